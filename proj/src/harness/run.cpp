#include "ucr/error.hpp"
#include "ucr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <thread>

namespace ucr {

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void record_solution(RunRecord& rec, const UcInstance& inst, const MilpProblem& prob, const MilpResult& res) {
    rec.status = res.stats.status;
    rec.stats = res.stats;
    if (!res.has_solution()) return;
    rec.objective = res.objective;
    const auto a = extract_assignment(prob, *res.solution);
    rec.schedule = to_schedule(a);
    rec.check = evaluate_solution(inst, a);
}

}  // namespace

ComparisonTable run_comparison(const UcInstance& inst, const std::string& instance_id,
                               const std::vector<MethodSpec>& methods, const MilpParams& params,
                               const HistoryBank& history) {
    const MilpProblem prob = build_uc_milp(inst);
    ComparisonTable table;

    RunRecord base;
    base.instance_id = instance_id;
    base.method = kBaselineMethod;
    base.provenance = "none";
    try {
        record_solution(base, inst, prob, solve_milp(prob, params));
        if (base.objective && *base.objective > 0.0) base.cost_err_pct = 0.0;
    } catch (const std::exception& e) {
        base.error = e.what();
    }
    table.records.push_back(base);

    for (const auto& spec : methods) {
        RunRecord rec;
        rec.instance_id = instance_id;
        rec.method = spec.name;
        try {
            MethodConfig cfg = spec.config;
            if (spec.name == "fix-at-optimum" && !cfg.optimum && base.schedule) cfg.optimum = base.schedule;
            auto gen = make_generator(spec.name, cfg);
            const auto t0 = Clock::now();
            const FreezeMask mask = gen->generate(inst, history);
            rec.maskgen_time_s = seconds_since(t0);
            rec.provenance = gen->provenance();
            auto hook = [&gen](const FreezeMask& prev, const Feedback& fb) { return gen->revise(prev, fb); };
            const auto pr = restricted_pipeline(inst, prob, mask, params, spec.options, hook);
            record_solution(rec, inst, prob, pr.solve);
            rec.mask_size = pr.mask.size();
            rec.reduction = reduction_metrics(prob, pr.mask);
            rec.screen_accepted = pr.screen.accepted();
            rec.validation_ok = pr.validation.ok();
            rec.fell_back = pr.fell_back;
            if (pr.fell_back) rec.provenance = "fallback";
            if (rec.objective && base.objective && *base.objective > 0.0)
                rec.cost_err_pct = relative_error(*rec.objective, *base.objective);
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
        table.records.push_back(std::move(rec));
    }
    table.rows = aggregate(table.records);
    return table;
}

SweepResult noise_sweep(const UcInstance& inst, const std::vector<double>& sigmas, int trials, std::uint64_t seed,
                        const std::vector<MethodSpec>& methods, const MilpParams& params,
                        const HistoryBank& history, int jobs) {
    if (trials < 1) throw SemanticError("noise_sweep: trials must be at least 1");
    for (double s : sigmas)
        if (!(s >= 0.0)) throw SemanticError("noise_sweep: sigma must be non-negative");
    const std::size_t n_tasks = sigmas.size() * static_cast<std::size_t>(trials);
    std::vector<std::vector<RunRecord>> out(n_tasks);

    auto run_task = [&](std::size_t idx) {
        const std::size_t i = idx / static_cast<std::size_t>(trials);
        const int k = static_cast<int>(idx % static_cast<std::size_t>(trials));
        const double sigma = sigmas[i];
        char id[64];
        std::snprintf(id, sizeof id, "sigma%g-trial%d", sigma, k + 1);
        std::vector<RunRecord> recs;
        try {
            const auto trial_inst = perturb_demand(inst, sigma, split_seed(seed, idx));
            auto specs = methods;
            for (auto& m : specs) m.config.seed = split_seed(m.config.seed, idx);
            recs = run_comparison(trial_inst, id, specs, params, history).records;
        } catch (const std::exception& e) {
            RunRecord r;
            r.instance_id = id;
            r.method = kBaselineMethod;
            r.error = e.what();
            recs.push_back(std::move(r));
        }
        for (auto& r : recs) {
            r.sigma = sigma;
            r.trial = k + 1;
        }
        out[idx] = std::move(recs);
    };

    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n_tasks);
    if (workers <= 1) {
        for (std::size_t idx = 0; idx < n_tasks; ++idx) run_task(idx);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t idx; (idx = next.fetch_add(1)) < n_tasks;) run_task(idx);
            });
        for (auto& th : pool) th.join();
    }

    SweepResult result;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        std::vector<RunRecord> group;
        for (int k = 0; k < trials; ++k) {
            auto& recs = out[i * static_cast<std::size_t>(trials) + static_cast<std::size_t>(k)];
            group.insert(group.end(), recs.begin(), recs.end());
        }
        result.groups.push_back({sigmas[i], aggregate(group)});
        result.records.insert(result.records.end(), group.begin(), group.end());
    }
    return result;
}

UcInstance carry_state(const UcInstance& today, const DailySchedule& solved) {
    solved.check(today.generators.size(), today.horizon);
    UcInstance next = today;
    const int T = today.horizon;
    for (std::size_t g = 0; g < next.generators.size(); ++g) {
        auto& gen = next.generators[g];
        const auto& u = solved.u[g];
        const int last = u[static_cast<std::size_t>(T - 1)];
        int run = 0;
        for (int t = T - 1; t >= 0 && u[static_cast<std::size_t>(t)] == last; --t) ++run;
        if (run == T && today.generators[g].u0 == last) run += today.generators[g].init_duration;
        const double p_last = solved.p[g][static_cast<std::size_t>(T - 1)];
        gen.u0 = last;
        gen.p0 = last ? std::clamp(p_last, gen.p_min, gen.p_max) : 0.0;
        gen.init_duration = std::max(1, std::min(run, std::max(gen.ut, gen.dt)));
    }
    return next;
}

LongHorizonResult long_horizon(const UcInstance& inst, const std::vector<std::vector<std::vector<double>>>& daily_demands,
                               const MethodSpec& method, bool carry, const MilpParams& params,
                               HistoryBank history) {
    LongHorizonResult out;
    UcInstance day = inst;
    for (std::size_t k = 0; k < daily_demands.size(); ++k) {
        const auto& demand = daily_demands[k];
        if (demand.size() != inst.buses.size())
            throw DimensionError("long_horizon: day " + std::to_string(k + 1) + " has the wrong number of buses");
        for (const auto& row : demand)
            if (row.size() != static_cast<std::size_t>(inst.horizon))
                throw DimensionError("long_horizon: day " + std::to_string(k + 1) + " has the wrong horizon");
        day.demand = demand;

        std::vector<int> u0;
        for (const auto& g : day.generators) u0.push_back(g.u0);
        out.initial_status.push_back(std::move(u0));

        auto table = run_comparison(day, "day" + std::to_string(k + 1), {method}, params, history);
        const RunRecord& base = table.records.front();
        const RunRecord& mine = table.records.back();
        if (base.schedule) history.days.push_back({day.total_demand_profile(), *base.schedule});

        const RunRecord* chosen = mine.schedule ? &mine : base.schedule ? &base : nullptr;
        ConstraintReport report;
        std::vector<int> final_u;
        if (chosen) {
            report = chosen->check;
            for (const auto& row : chosen->schedule->u) final_u.push_back(row.back());
        } else {
            report.violations.push_back({"infeasible", "", 0, 0.0});
        }
        out.final_status.push_back(std::move(final_u));
        out.reports.push_back(std::move(report));
        out.records.insert(out.records.end(), table.records.begin(), table.records.end());

        if (carry && chosen) day = carry_state(day, *chosen->schedule);
    }
    return out;
}

HistoryBank generate_history(const UcInstance& inst, int days, double sigma, std::uint64_t seed,
                             const MilpParams& params) {
    if (days < 0) throw SemanticError("generate_history: days must be non-negative");
    HistoryBank bank;
    for (int k = 0; k < days; ++k) {
        const auto day = perturb_demand(inst, sigma, split_seed(seed, static_cast<std::uint64_t>(k)));
        const auto prob = build_uc_milp(day);
        const auto res = solve_milp(prob, params);
        if (!res.has_solution())
            throw NumericalError("generate_history: day " + std::to_string(k + 1) + " has no solution (" +
                                 milp_status_name(res.stats.status) + ")");
        bank.days.push_back({day.total_demand_profile(), to_schedule(extract_assignment(prob, *res.solution))});
    }
    return bank;
}

}  // namespace ucr
