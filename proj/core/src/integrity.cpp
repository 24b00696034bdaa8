// Copyright 2026 The Sledger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sledger/integrity.hpp"

#include <fmt/format.h>

#include "sledger/access_control.hpp"
#include "sledger/consensus.hpp"
#include "sledger/error.hpp"
#include "sledger/schema.hpp"
#include "sledger/world_state.hpp"

namespace sledger::integrity {

ChainReport chain_verify(const ledger::ChainConfig& config, std::span<const ledger::Block> chain) {
  if (chain.empty()) return ChainReport{false, 0, "empty ledger"};
  Digest prev = Digest::zero();
  for (std::uint64_t h = 0; h < chain.size(); ++h) {
    if (auto defect = consensus::block_defect(config, chain[h], h, prev)) {
      return ChainReport{false, h, *defect};
    }
    prev = chain[h].content_hash;
  }
  return ChainReport{};
}

AgreementReport verify_agreement(const ledger::ChainConfig& config, const ledger::Block& block,
                                 ledger::PolicyMode policy) {
  auto check = consensus::check_certificate(config, block, policy);
  AgreementReport out;
  out.valid_yes = check.valid_yes;
  out.threshold = check.threshold;
  out.deficiencies = std::move(check.deficiencies);
  out.ok = out.deficiencies.empty() && check.binds && out.valid_yes >= out.threshold;
  return out;
}

StateSnapshot audit_state_at(const ledger::ChainConfig& config,
                             std::span<const ledger::Block> chain, std::uint64_t height) {
  if (height >= chain.size()) {
    throw Error(Errc::out_of_range,
                fmt::format("height {} is past the head ({} blocks)", height, chain.size()));
  }
  auto prefix = chain.first(height + 1);
  auto report = chain_verify(config, prefix);
  if (!report.ok) {
    throw Error(Errc::chain_verification_failure,
                fmt::format("chain invalid at height {}: {}", *report.first_invalid, report.reason));
  }
  StateSnapshot snap;
  snap.height = height;
  for (const auto& block : prefix) {
    if (block.status != ledger::BlockStatus::committed) continue;
    for (const auto& entry : block.entries) {
      for (auto& w : state::entry_effects(entry)) {
        snap.store.write_conditional(w.key, std::move(w.value), std::nullopt);
      }
    }
  }
  snap.digest = state::state_digest(snap.store);
  return snap;
}

CodeAudit verify_code_agreements(std::span<const ledger::Block> chain,
                                 const substrate::BlobSource& blobs) {
  CodeAudit audit;
  auto check = [&](std::uint64_t height, const std::string& entry_id,
                   const ledger::CodeArtifact& a) {
    ++audit.checked;
    const auto label = fmt::format("{} v{}", a.name, a.version);
    const auto* blob = blobs.find(substrate::FunctionRegistry::code_key(a.name, a.version));
    std::string problem;
    if (!blob) {
      problem = "missing blob";
    } else if (!blob->embargoed) {
      problem = "blob is not embargoed";
    } else if (auto actual = hash_content(blob->bytes); actual != a.digest) {
      problem = fmt::format("stored code hashes to {}, agreed {}", actual.short_hex(),
                            a.digest.short_hex());
    }
    if (!problem.empty()) audit.mismatches.push_back({height, entry_id, label, problem});
  };
  for (const auto& block : chain) {
    if (block.status != ledger::BlockStatus::committed) continue;
    for (const auto& entry : block.entries) {
      if (const auto* agreement = std::get_if<ledger::CodeAgreement>(&entry.body)) {
        for (const auto& a : agreement->artifacts) check(block.height, entry.id(), a);
      } else if (const auto* sw = std::get_if<ledger::SoftwareUpdate>(&entry.body)) {
        check(block.height, entry.id(), sw->artifact);
      }
    }
  }
  return audit;
}

std::vector<MetadataProblem> audit_metadata(std::span<const ledger::Block> chain) {
  std::vector<MetadataProblem> out;
  acl::AclState acl;
  std::shared_ptr<const schema::CompiledChainSpec> spec;
  for (const auto& block : chain) {
    if (block.status != ledger::BlockStatus::committed) continue;
    for (const auto& entry : block.entries) {
      auto report = [&](std::string problem) {
        out.push_back({block.height, entry.id(), std::move(problem)});
      };
      if (const auto* evo = std::get_if<ledger::SchemaEvolution>(&entry.body)) {
        std::shared_ptr<const schema::CompiledChainSpec> next;
        try {
          next = std::make_shared<const schema::CompiledChainSpec>(
              schema::compile_schema_json(evo->schema_json));
        } catch (const schema::SchemaError& e) {
          report(fmt::format("schema does not compile: {}", e.what()));
          continue;
        }
        if (next->digest() != evo->schema_digest) report("schema digest does not match document");
        if (spec) {
          for (const auto& d : schema::check_additive(*spec, *next)) report(d.str());
        }
        spec = next;
        acl.set_schema(spec);
      } else if (const auto* upd = std::get_if<ledger::AclUpdate>(&entry.body)) {
        if (!spec) {
          report("ACL update before any schema");
          continue;
        }
        for (auto& p : acl.check_update(*upd)) report(std::move(p));
        acl.apply(*upd, block.height);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

Bytes export_ledger(std::span<const ledger::Block> chain) {
  ByteWriter w;
  for (const auto& block : chain) w.bytes(ledger::encode_block(block));
  return w.take();
}

ImportResult import_ledger(ByteView bytes) {
  ImportResult out;
  if (bytes.empty()) {
    out.failed_at = 0;
    out.error = "empty ledger file";
    return out;
  }
  ByteReader r(bytes);
  while (r.remaining() > 0) {
    const auto index = out.blocks.size();
    try {
      const auto len = r.u32();
      out.blocks.push_back(ledger::decode_block(r.raw(len)));
    } catch (const Error& e) {
      out.failed_at = index;
      out.error = e.what();
      break;
    }
  }
  return out;
}

std::string AuditReport::text() const {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

AuditReport audit_export(const ledger::ChainConfig& config, ByteView export_bytes) {
  AuditReport report;
  auto fail = [&](std::uint64_t height, std::string_view check, const std::string& why) {
    report.lines.push_back(fmt::format("{}|{}|FAIL {}", height, check, why));
    report.ok = false;
    if (!report.first_invalid || height < *report.first_invalid) report.first_invalid = height;
  };

  auto imported = import_ledger(export_bytes);
  const auto& chain = imported.blocks;
  Digest prev = Digest::zero();
  for (std::uint64_t h = 0; h < chain.size(); ++h) {
    const auto& block = chain[h];
    if (auto defect = consensus::block_defect(config, block, h, prev)) {
      fail(h, "chain", *defect);
      break;
    }
    report.lines.push_back(fmt::format("{}|chain|ok", h));
    auto agreement = verify_agreement(config, block, config.policy);
    const auto tally = fmt::format("{} valid yes, threshold {}", agreement.valid_yes,
                                   agreement.threshold);
    if (block.status == ledger::BlockStatus::aborted) {
      report.lines.push_back(fmt::format("{}|agreement|aborted ({})", h, tally));
    } else {
      report.lines.push_back(fmt::format("{}|agreement|ok ({})", h, tally));
    }
    prev = block.content_hash;
  }
  if (imported.failed_at && report.ok) {
    fail(*imported.failed_at, "decode", imported.error);
  }
  if (!report.ok) return report;

  for (const auto& p : audit_metadata(chain)) {
    fail(p.height, "metadata", fmt::format("{}: {}", p.entry_id, p.problem));
  }
  if (!report.ok) return report;

  auto snapshot = audit_state_at(config, chain, chain.size() - 1);
  report.head_digest = snapshot.digest;
  report.lines.push_back(
      fmt::format("{}|state|ok {} ({} keys)", snapshot.height, snapshot.digest.hex(),
                  snapshot.store.size()));
  return report;
}

}  // namespace sledger::integrity
