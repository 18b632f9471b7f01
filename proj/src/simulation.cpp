#include "parsley/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace parsley {

namespace {
// Phase ids carried in PhaseBoundary events.
constexpr std::int64_t kPhaseChurnStart = 0;
constexpr std::int64_t kPhaseChurnEnd = 1;
constexpr std::int64_t kPhaseSample = 2;
// MaintenanceTick with this group id is the global stabilization sweep.
constexpr GroupId kStabilizationSweep = 0;
}  // namespace

void SimulationConfig::validate() const {
  timers.validate();
  maintenance.validate();
  data.validate();
  churn.validate();
  if (n_peers < sizes.l) {
    throw InsufficientPeers("n_peers=" + std::to_string(n_peers) +
                            " below minimum group size l=" +
                            std::to_string(sizes.l));
  }
  if (bootstrap_joins_per_s <= 0) {
    throw ConfigError("bootstrap_joins_per_s must be positive");
  }
  if (warmup_s < 0 || quiescence_window_s <= 0 || quiescence_cap_s <= 0) {
    throw ConfigError("phase durations must be positive");
  }
}

struct Simulation::Impl {
  SimulationConfig cfg;
  SimulationProbe probe;

  Overlay overlay;
  Topology topo;
  Maintenance maint;
  MetricsSink sink;
  EventQueue queue;

  RngStream rng_dataset;
  RngStream rng_size_check;
  RngStream rng_maintenance;
  RngStream rng_heat;
  RngStream rng_victims;
  RngStream rng_join;
  RngStream rng_reloc;

  // Join/removal schedule: bootstrap batches first, then churn moments.
  std::vector<ChurnMomentPlan> moments;

  PeerId next_peer_id = 1;
  SimTime churn_start_ms = 0;
  SimTime churn_end_ms = 0;
  SimTime last_op_ms = 0;

  // Time integral of 1/group_count over the open window, in seconds.
  double inv_groups_integral_s = 0;
  SimTime seg_start_ms = 0;
  std::size_t seg_groups = 0;

  bool sampling = false;
  std::vector<SecondSample> samples;

  explicit Impl(SimulationConfig config, SimulationProbe p)
      : cfg(std::move(config)),
        probe(std::move(p)),
        topo(overlay, cfg.sizes, cfg.timers, cfg.mode,
             cfg.maintenance.control_msg_bytes,
             cfg.maintenance.passive_view_size),
        maint(cfg.maintenance),
        rng_dataset(cfg.seed, "dataset"),
        rng_size_check(cfg.seed, "size_check"),
        rng_maintenance(cfg.seed, "maintenance"),
        rng_heat(cfg.seed, "heat"),
        rng_victims(cfg.seed, "victims"),
        rng_join(cfg.seed, "join_placement"),
        rng_reloc(cfg.seed, "relocation_view") {}

  SimTime size_check_delay() {
    return rng_size_check.uniform_int(sim_seconds(cfg.timers.size_check_min_s),
                                      sim_seconds(cfg.timers.size_check_max_s));
  }

  void arm_group_timers(GroupId g) {
    Event maint_ev;
    maint_ev.kind = EventKind::MaintenanceTick;
    maint_ev.group_id = g;
    queue.schedule(queue.now() + sim_seconds(cfg.timers.maintenance_period_s),
                   maint_ev);

    Event check;
    check.kind = EventKind::SizeCheck;
    check.group_id = g;
    check.recurring = true;
    queue.schedule(queue.now() + size_check_delay(), check);
  }

  void note_op() {
    last_op_ms = queue.now();
  }

  void note_group_count_change() {
    if (!sink.window_open()) return;
    const SimTime now = queue.now();
    if (seg_groups > 0 && now > seg_start_ms) {
      inv_groups_integral_s += to_seconds(now - seg_start_ms) /
                               static_cast<double>(seg_groups);
    }
    seg_start_ms = now;
    seg_groups = overlay.group_count();
  }

  void record_all(const std::vector<TransferReport>& reports) {
    for (const auto& r : reports) sink.record(r);
  }

  void execute_split(GroupId g, SplitCause cause) {
    SplitOutcome out = topo.split(g, cause);
    sink.record(out.report);
    arm_group_timers(out.upper_child);
    note_op();
    note_group_count_change();
    if (probe.on_split) probe.on_split(out);
  }

  void execute_merge(GroupId g) {
    auto out = topo.merge(g);
    if (!out) return;  // last group; nothing to merge with
    sink.record(out->report);
    note_op();
    note_group_count_change();
    if (probe.on_merge) probe.on_merge(*out);
  }

  void do_size_check(const Event& ev) {
    const GroupId g = ev.group_id;
    if (!overlay.has_group(g)) return;  // stale timer of a dead group

    switch (topo.size_decision(g)) {
      case SizeAction::Merge:
        execute_merge(g);
        break;
      case SizeAction::SplitSize:
        if (overlay.group(g).size() >= 2 * cfg.sizes.l) {
          execute_split(g, SplitCause::SizeLimit);
        }
        break;
      case SizeAction::SplitOverload:
        execute_split(g, SplitCause::Overload);
        break;
      case SizeAction::None:
        break;
    }

    if (ev.recurring && overlay.has_group(g)) {
      Event next;
      next.kind = EventKind::SizeCheck;
      next.group_id = g;
      next.recurring = true;
      queue.schedule(queue.now() + size_check_delay(), next);
    }
  }

  void do_maintenance(const Event& ev) {
    if (ev.group_id == kStabilizationSweep) {
      sink.record(maint.stabilization_tick(overlay));
      Event next = ev;
      queue.schedule(
          queue.now() + sim_seconds(cfg.maintenance.stabilization_period_s),
          next);
      return;
    }
    if (!overlay.has_group(ev.group_id)) return;
    record_all(maint.maintenance_tick(overlay.group_mut(ev.group_id),
                                      cfg.timers, rng_maintenance));
    Event next = ev;
    queue.schedule(queue.now() + sim_seconds(cfg.timers.maintenance_period_s),
                   next);
  }

  void do_relocation_round() {
    auto events = topo.relocation_round(queue.now(), rng_reloc);
    for (const auto& ev : events) {
      sink.record(ev.report);
      note_op();
      if (probe.on_relocation) probe.on_relocation(ev.peer, queue.now());
    }
    Event next;
    next.kind = EventKind::RelocationRound;
    queue.schedule(
        queue.now() + sim_seconds(cfg.timers.relocation_check_period_s), next);
  }

  void do_churn_moment(const Event& ev) {
    const auto& m = moments.at(static_cast<std::size_t>(ev.cycle_index));
    if (m.removals > 0) {
      auto victims =
          pick_victims(overlay, m.removals, cfg.churn.epsilon, rng_victims);
      for (PeerId v : victims) {
        LeaveOutcome out = topo.handle_leave(v);
        if (out.forced_merge) {
          sink.record(out.forced_merge->report);
          note_op();
          note_group_count_change();
          if (probe.on_merge) probe.on_merge(*out.forced_merge);
        }
      }
    }
    for (std::uint32_t i = 0; i < m.additions; ++i) {
      JoinOutcome out = topo.handle_join(next_peer_id++, join_target());
      sink.record(out.report);
      maint.note_join(overlay.group_mut(out.group));
      Event check;
      check.kind = EventKind::SizeCheck;
      check.group_id = out.group;
      check.recurring = false;
      queue.schedule(queue.now(), check);
    }
  }

  // The joiner enters the group of a uniformly drawn live peer (its
  // bootstrap contact); the very first join lands in the initial group.
  GroupId join_target() {
    if (overlay.peer_count() == 0) return overlay.groups().begin()->first;
    const PeerId contact =
        overlay.live_peer_at(rng_join.uniform_below(overlay.peer_count()));
    return overlay.group_of_peer(contact);
  }

  void take_sample() {
    SecondSample s;
    s.time_s = to_seconds(queue.now());
    s.live_peers = overlay.peer_count();
    s.groups = overlay.group_count();
    s.tallies = sink.metrics();
    samples.push_back(s);
    Event next;
    next.kind = EventKind::PhaseBoundary;
    next.cycle_index = kPhaseSample;
    queue.schedule(queue.now() + sim_seconds(1.0), next);
  }

  void do_phase_boundary(const Event& ev, RunResult& result) {
    switch (ev.cycle_index) {
      case kPhaseChurnStart:
        result.digest_warmup_end = overlay.store_digest();
        assign_heat(overlay, cfg.churn.hot_ratio, rng_heat);
        sink.open_window();
        seg_start_ms = queue.now();
        seg_groups = overlay.group_count();
        break;
      case kPhaseChurnEnd:
        result.digest_churn_end = overlay.store_digest();
        break;
      case kPhaseSample:
        take_sample();
        break;
      default:
        break;
    }
  }

  void handle(const Event& ev, RunResult& result) {
    switch (ev.kind) {
      case EventKind::MaintenanceTick: do_maintenance(ev); break;
      case EventKind::SizeCheck: do_size_check(ev); break;
      case EventKind::RelocationRound: do_relocation_round(); break;
      case EventKind::ChurnMoment: do_churn_moment(ev); break;
      case EventKind::PhaseBoundary: do_phase_boundary(ev, result); break;
    }
  }

  // Splits the bootstrap population into per-second batches so that the
  // periodic relocation/size checks interleave with the joins, then
  // appends the churn moments.
  void build_moments() {
    const double rate = cfg.bootstrap_joins_per_s;
    std::uint32_t placed = 0;
    std::uint32_t second = 0;
    while (placed < cfg.n_peers) {
      const auto target = static_cast<std::uint32_t>(std::min<double>(
          cfg.n_peers, std::llround(rate * static_cast<double>(second + 1))));
      ChurnMomentPlan m;
      m.cycle = second;
      m.additions = target > placed ? target - placed : 0;
      if (m.additions > 0) moments.push_back(m);
      placed = std::max(placed, target);
      ++second;
    }
    const SimTime bootstrap_end =
        sim_seconds(static_cast<double>(second));
    churn_start_ms = bootstrap_end + sim_seconds(cfg.warmup_s);
    churn_end_ms =
        churn_start_ms + sim_seconds(static_cast<double>(cfg.churn.churn_cycles));
  }

  void schedule_initial_events(bool with_churn) {
    // Join batches (already built, times relative to t=0).
    std::size_t n_bootstrap = moments.size();
    for (std::size_t i = 0; i < n_bootstrap; ++i) {
      Event ev;
      ev.kind = EventKind::ChurnMoment;
      ev.cycle_index = static_cast<std::int64_t>(i);
      queue.schedule(sim_seconds(static_cast<double>(moments[i].cycle)), ev);
    }

    Event stab;
    stab.kind = EventKind::MaintenanceTick;
    stab.group_id = kStabilizationSweep;
    queue.schedule(sim_seconds(cfg.maintenance.stabilization_period_s), stab);

    if (cfg.mode != Mode::NPPR && cfg.sizes.relocation_enabled()) {
      Event reloc;
      reloc.kind = EventKind::RelocationRound;
      queue.schedule(sim_seconds(cfg.timers.relocation_check_period_s), reloc);
    }

    if (!with_churn) return;

    Event start;
    start.kind = EventKind::PhaseBoundary;
    start.cycle_index = kPhaseChurnStart;
    queue.schedule(churn_start_ms, start);

    ChurnPlan plan = build_churn_plan(cfg.churn);
    for (const auto& m : plan.moments) {
      const std::size_t idx = moments.size();
      moments.push_back(m);
      Event ev;
      ev.kind = EventKind::ChurnMoment;
      ev.cycle_index = static_cast<std::int64_t>(idx);
      queue.schedule(churn_start_ms + sim_seconds(static_cast<double>(m.cycle)),
                     ev);
    }

    Event end;
    end.kind = EventKind::PhaseBoundary;
    end.cycle_index = kPhaseChurnEnd;
    queue.schedule(churn_end_ms, end);
  }

  void init_overlay() {
    std::vector<DataObject> dataset =
        cfg.dataset_override ? std::move(*cfg.dataset_override)
                             : generate_dataset(cfg.data, rng_dataset);
    GroupId first = overlay.init_full_ring(std::move(dataset));
    arm_group_timers(first);
  }

  void run_bootstrap_only() {
    build_moments();
    schedule_initial_events(/*with_churn=*/false);
    RunResult scratch;
    const SimTime bootstrap_end =
        churn_start_ms - sim_seconds(cfg.warmup_s);
    run_until(
        queue, [&](const Event& ev) { handle(ev, scratch); },
        EndCondition::at_time(bootstrap_end));
  }

  RunResult run_full() {
    build_moments();
    schedule_initial_events(/*with_churn=*/true);
    RunResult result;

    if (sampling) {
      Event s;
      s.kind = EventKind::PhaseBoundary;
      s.cycle_index = kPhaseSample;
      queue.schedule(0, s);
    }

    run_until(
        queue, [&](const Event& ev) { handle(ev, result); },
        EndCondition::at_time(churn_end_ms));

    // Stabilization: run until nothing topological has happened for the
    // quiescence window, or until the hard cap.
    const SimTime cap_deadline = churn_end_ms + sim_seconds(cfg.quiescence_cap_s);
    for (;;) {
      const SimTime silence_deadline =
          std::max(last_op_ms, churn_end_ms) + sim_seconds(cfg.quiescence_window_s);
      const SimTime deadline = std::min(silence_deadline, cap_deadline);
      auto next = queue.next_time();
      if (!next || *next > deadline) {
        result.reached_quiescence = silence_deadline <= cap_deadline;
        queue.advance_to(deadline);
        break;
      }
      handle(queue.pop(), result);
    }

    // Finalize.
    note_group_count_change();  // flush the last integral segment
    result.digest_run_end = overlay.store_digest();
    result.end_time_s = to_seconds(queue.now());

    RunMetrics& m = sink.metrics();
    m.final_peers = overlay.peer_count();
    m.final_groups = overlay.group_count();
    const double window_s = to_seconds(queue.now() - churn_start_ms);
    m.mean_group_state_bytes =
        window_s > 0 ? static_cast<double>(overlay.total_stored_bytes()) *
                           (inv_groups_integral_s / window_s)
                     : 0.0;
    result.metrics = m;
    result.per_second = std::move(samples);
    return result;
  }
};

Simulation::Simulation(SimulationConfig cfg, SimulationProbe probe) {
  cfg.validate();
  impl_ = std::make_unique<Impl>(std::move(cfg), std::move(probe));
  impl_->init_overlay();
}

Simulation::~Simulation() = default;

RunResult Simulation::run(bool sample_per_second) {
  impl_->sampling = sample_per_second;
  return impl_->run_full();
}

Overlay Simulation::take_overlay_after_bootstrap() {
  impl_->run_bootstrap_only();
  return std::move(impl_->overlay);
}

Overlay bootstrap_overlay(std::uint32_t n_peers, const SizeConfig& sizes,
                          Mode mode, std::vector<DataObject> dataset,
                          std::uint64_t seed) {
  SimulationConfig cfg;
  cfg.sizes = sizes;
  cfg.mode = mode;
  cfg.n_peers = n_peers;
  cfg.seed = seed;
  cfg.dataset_override = std::move(dataset);
  // Same bootstrap horizon as the harness default (400 s) regardless of
  // the population, so the periodic timers interleave identically.
  cfg.bootstrap_joins_per_s = static_cast<double>(n_peers) / 400.0;
  Simulation sim(std::move(cfg));
  return sim.take_overlay_after_bootstrap();
}

}  // namespace parsley
