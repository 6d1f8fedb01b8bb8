#include "etl/keyval.hpp"

#include "etl/errors.hpp"

namespace etl {

KeyValidationResult validate_keys_record(Store& store, const StagingRecord& rec,
                                         const TargetMapping& target, ValidateStats& stats) {
  KeyValidationResult result;
  result.record = rec;
  for (const auto& fk : target.fk_defs) {
    auto it = rec.fk_values.find(fk.column);
    if (it == rec.fk_values.end() || it->second.empty())
      throw Error(ErrorCode::MissingFkValue,
                  target.name + " " + bk_display(rec.bk) + ": no value for foreign key '" +
                      fk.column + "'");
    const BkTuple ref_bk{it->second};

    if (auto sor = store.lookup_sor_static_by_bk(fk.references, ref_bk)) {
      result.record.resolved_keys[fk.column] = sor->sk;
      ++stats.resolved_from_sor;
      continue;
    }
    if (auto staged = store.lookup_lv2_by_bk(fk.references, ref_bk)) {
      result.record.resolved_keys[fk.column] = staged->sk;
      ++stats.resolved_from_lv2;
      continue;
    }
    StagingRecord augment;
    augment.op = OpCode::A;
    augment.sk = store.next_surrogate_key(fk.references);
    augment.bk = ref_bk;
    augment.af = true;
    store.upsert_lv2(fk.references, augment);
    result.record.resolved_keys[fk.column] = augment.sk;
    result.augments.push_back(std::move(augment));
    ++stats.augments_created;
  }
  return result;
}

ValidateStats validate_keys_table(Store& store, const MappingConfig& cfg,
                                  const TargetMapping& target) {
  ValidateStats stats;
  stats.target = target.name;
  for (const auto& rec : store.lv2_rows(target.name)) {
    // Closed (E) rows carry no key data; augment placeholders have none.
    if (rec.op == OpCode::E || rec.op == OpCode::A) continue;
    ++stats.rows_examined;
    auto result = validate_keys_record(store, rec, target, stats);
    store.upsert_lv2(target.name, result.record);
  }
  store.flush();
  (void)cfg;
  return stats;
}

}  // namespace etl
