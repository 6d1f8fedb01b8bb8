#include "etl/orchestrate.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <random>
#include <set>
#include <thread>
#include <vector>

#include "etl/errors.hpp"
#include "etl/extract.hpp"
#include "etl/keyval.hpp"
#include "etl/load.hpp"
#include "etl/transform.hpp"

namespace etl {

namespace {

struct Job {
  std::string phase;  // transform | validate | load
  std::string target;
  std::vector<std::size_t> deps;
  std::set<std::string> writes;
  std::set<std::string> reads;
};

std::vector<Job> build_jobs(const MappingConfig& cfg) {
  std::vector<Job> jobs;
  std::map<std::string, std::size_t> transform_of, validate_of, load_of;
  for (const auto& t : cfg.targets) {
    Job tr{"transform", t.name, {}, {"lv2/" + t.name}, {"sor/" + t.name}};
    transform_of[t.name] = jobs.size();
    jobs.push_back(std::move(tr));

    Job va{"validate", t.name, {transform_of[t.name]}, {"lv2/" + t.name}, {}};
    for (const auto& fk : t.fk_defs) {
      va.writes.insert("lv2/" + fk.references);  // augment insertion
      va.reads.insert("sor/" + fk.references);
    }
    validate_of[t.name] = jobs.size();
    jobs.push_back(std::move(va));

    Job lo{"load", t.name, {validate_of[t.name]}, {"sor/" + t.name}, {"lv2/" + t.name}};
    load_of[t.name] = jobs.size();
    jobs.push_back(std::move(lo));
  }
  // Augments must be staged before the table they land in loads.
  for (const auto& t : cfg.targets)
    for (const auto& fk : t.fk_defs)
      jobs[load_of[fk.references]].deps.push_back(validate_of[t.name]);
  return jobs;
}

// Dependency- and conflict-aware pool. Ready jobs are picked in stable
// order, or shuffled deterministically when a seed is given.
class JobRunner {
 public:
  JobRunner(std::vector<Job> jobs, int parallelism, unsigned seed)
      : jobs_(std::move(jobs)), parallelism_(std::max(1, parallelism)), rng_(seed), seed_(seed) {
    done_.assign(jobs_.size(), false);
    started_.assign(jobs_.size(), false);
  }

  void run(const std::function<void(const Job&)>& body) {
    std::vector<std::thread> workers;
    std::size_t n = std::min<std::size_t>(parallelism_, jobs_.size());
    workers.reserve(n);
    for (std::size_t i = 0; i < std::max<std::size_t>(n, 1); ++i)
      workers.emplace_back([this, &body] { worker(body); });
    for (auto& w : workers) w.join();
    if (error_) std::rethrow_exception(error_);
  }

 private:
  bool runnable(std::size_t i) const {
    if (started_[i]) return false;
    for (std::size_t dep : jobs_[i].deps)
      if (!done_[dep]) return false;
    for (const auto& r : jobs_[i].writes)
      if (writing_.count(r) || reading_.count(r)) return false;
    for (const auto& r : jobs_[i].reads)
      if (writing_.count(r)) return false;
    return true;
  }

  void worker(const std::function<void(const Job&)>& body) {
    std::unique_lock lock(mutex_);
    while (true) {
      if (error_ || finished_count_ == jobs_.size()) return;
      std::vector<std::size_t> ready;
      for (std::size_t i = 0; i < jobs_.size(); ++i)
        if (runnable(i)) ready.push_back(i);
      if (ready.empty()) {
        if (running_ == 0 && finished_count_ < jobs_.size() && !error_) {
          // Should be impossible: the graph is acyclic by construction.
          error_ = std::make_exception_ptr(
              Error(ErrorCode::PhaseFailure, "job graph stalled"));
          cv_.notify_all();
          return;
        }
        cv_.wait(lock);
        continue;
      }
      std::size_t pick = ready.front();
      if (seed_ != 0) pick = ready[std::uniform_int_distribution<std::size_t>(
          0, ready.size() - 1)(rng_)];
      const Job& job = jobs_[pick];
      started_[pick] = true;
      ++running_;
      for (const auto& r : job.writes) writing_.insert(r);
      for (const auto& r : job.reads) ++reading_counts_[r], reading_.insert(r);

      lock.unlock();
      std::exception_ptr failure;
      try {
        body(job);
      } catch (...) {
        failure = std::current_exception();
      }
      lock.lock();

      for (const auto& r : job.writes) writing_.erase(r);
      for (const auto& r : job.reads)
        if (--reading_counts_[r] == 0) reading_.erase(r);
      --running_;
      done_[pick] = true;
      ++finished_count_;
      if (failure && !error_) error_ = failure;
      cv_.notify_all();
      if (error_) return;
    }
  }

  std::vector<Job> jobs_;
  std::size_t parallelism_;
  std::mt19937 rng_;
  unsigned seed_;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::vector<bool> done_, started_;
  std::set<std::string> writing_, reading_;
  std::map<std::string, int> reading_counts_;
  std::size_t running_ = 0;
  std::size_t finished_count_ = 0;
  std::exception_ptr error_;
};

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

void run_pipeline_jobs(Store& store, const MappingConfig& cfg, Date batch_date,
                       const RunOptions& options, BatchReport& report) {
  auto t0 = std::chrono::steady_clock::now();
  std::mutex stats_mutex;
  JobRunner runner(build_jobs(cfg), options.parallelism, options.order_seed);
  runner.run([&](const Job& job) {
    if (options.fault_hook) options.fault_hook(job.phase, job.target);
    const TargetMapping& target = cfg.target(job.target);
    auto j0 = std::chrono::steady_clock::now();
    if (job.phase == "transform") {
      auto stats = transform_table(store, cfg, target, batch_date);
      std::lock_guard lock(stats_mutex);
      report.phase_ms[job.phase] += ms_since(j0);
      report.transforms[job.target] = std::move(stats);
    } else if (job.phase == "validate") {
      auto stats = validate_keys_table(store, cfg, target);
      std::lock_guard lock(stats_mutex);
      report.phase_ms[job.phase] += ms_since(j0);
      report.validates[job.target] = std::move(stats);
    } else {
      auto stats = load_table(store, cfg, target, batch_date);
      std::lock_guard lock(stats_mutex);
      report.phase_ms[job.phase] += ms_since(j0);
      report.loads[job.target] = std::move(stats);
    }
  });
  report.phase_ms["pipeline"] = ms_since(t0);

  auto mismatches = report.count_mismatches();
  if (!mismatches.empty())
    throw Error(ErrorCode::PhaseFailure, "staged/loaded count mismatch: " + mismatches.front());
}

void check_batch_sequence(Store& store, Date batch_date) {
  Date last_success = kDateAbsent;
  Date last_incomplete = kDateAbsent;
  for (const auto& entry : store.batch_ledger()) {
    if (entry.outcome == "success")
      last_success = std::max(last_success, entry.date);
    else
      last_incomplete = std::max(last_incomplete, entry.date);
  }
  if (last_success != kDateAbsent && batch_date <= last_success)
    throw Error(ErrorCode::BatchSequence,
                "batch " + format_date(batch_date) + " not past the last completed batch " +
                    format_date(last_success));
  if (last_incomplete != kDateAbsent && last_incomplete != batch_date &&
      last_incomplete < batch_date)
    throw Error(ErrorCode::BatchSequence, "batch " + format_date(last_incomplete) +
                                              " did not complete; rerun it first");
}

}  // namespace

BatchReport run_batch(Store& store, const MappingConfig& cfg, Date batch_date,
                      const RunOptions& options) {
  BatchReport report;
  report.batch_date = batch_date;
  check_batch_sequence(store, batch_date);

  // All feeds must be present before anything is touched.
  std::vector<std::pair<std::string, std::filesystem::path>> feeds;
  for (const auto& f : cfg.source_feeds) {
    auto path = cfg.feed_path(f.id, batch_date);
    if (!std::filesystem::exists(path))
      throw Error(ErrorCode::FeedMissing, "feed " + f.id + ": " + path.string());
    feeds.emplace_back(f.id, path);
  }

  const std::string snapshot_id = format_date(batch_date);
  store.snapshot_sor(snapshot_id);
  store.record_batch(batch_date, "running");

  try {
    auto t0 = std::chrono::steady_clock::now();
    std::mutex stats_mutex;
    std::vector<Job> extract_jobs;
    for (const auto& [id, _] : feeds)
      extract_jobs.push_back({"extract", id, {}, {"lv1/" + id}, {}});
    JobRunner extract_runner(extract_jobs, options.parallelism, options.order_seed);
    extract_runner.run([&](const Job& job) {
      if (options.fault_hook) options.fault_hook(job.phase, job.target);
      auto path = cfg.feed_path(job.target, batch_date);
      auto stats = ingest_change_feed(store, cfg, job.target, path, batch_date);
      std::lock_guard lock(stats_mutex);
      report.ingests.push_back(std::move(stats));
    });
    std::sort(report.ingests.begin(), report.ingests.end(),
              [](const IngestStats& a, const IngestStats& b) { return a.feed_id < b.feed_id; });
    store.set_lv1_batch_date(batch_date);
    report.phase_ms["extract"] = ms_since(t0);

    store.clear_all_lv2();
    run_pipeline_jobs(store, cfg, batch_date, options, report);

    store.flush();
    store.record_batch(batch_date, "success");
    report.outcome = "success";
  } catch (const Error& e) {
    store.restore_sor(snapshot_id);
    store.record_batch(batch_date, "aborted");
    report.outcome = "aborted";
    report.error_code = to_string(e.code());
    report.error_detail = e.detail();
  } catch (const std::exception& e) {
    store.restore_sor(snapshot_id);
    store.record_batch(batch_date, "aborted");
    report.outcome = "aborted";
    report.error_code = to_string(ErrorCode::PhaseFailure);
    report.error_detail = e.what();
  }
  return report;
}

BatchReport rerun_batch(Store& store, const MappingConfig& cfg, Date batch_date) {
  const std::string snapshot_id = format_date(batch_date);
  if (!store.snapshot_exists(snapshot_id))
    throw Error(ErrorCode::SnapshotNotFound,
                "no batch-start snapshot for " + format_date(batch_date));
  if (store.lv1_batch_date() != batch_date)
    throw Error(ErrorCode::Lv1Missing, "ssa1 holds batch " +
                                           format_date(store.lv1_batch_date()) + ", not " +
                                           format_date(batch_date));

  BatchReport report;
  report.batch_date = batch_date;
  store.restore_sor(snapshot_id);
  store.record_batch(batch_date, "running");
  try {
    store.clear_all_lv2();
    RunOptions options;  // deterministic: sequential, stable order
    run_pipeline_jobs(store, cfg, batch_date, options, report);
    store.flush();
    store.record_batch(batch_date, "success");
    report.outcome = "success";
  } catch (const Error& e) {
    store.restore_sor(snapshot_id);
    store.record_batch(batch_date, "aborted");
    report.outcome = "aborted";
    report.error_code = to_string(e.code());
    report.error_detail = e.detail();
  } catch (const std::exception& e) {
    store.restore_sor(snapshot_id);
    store.record_batch(batch_date, "aborted");
    report.outcome = "aborted";
    report.error_code = to_string(ErrorCode::PhaseFailure);
    report.error_detail = e.what();
  }
  return report;
}

}  // namespace etl
