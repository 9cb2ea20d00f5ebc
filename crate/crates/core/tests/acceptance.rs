//! Acceptance suite: one PASS/FAIL/SKIP line per exit criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines come out in order;
//! the process exits non-zero if any criterion fails.
//!
//! The fixed-angle schedule defaults to `data/u3r_fixed_angles.json`; set
//! `ITEBE_SCHEDULE` to use another file, or to an empty string to skip the
//! QAOA criterion.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::Rng;

use common::*;
use itebe::experiment::{
    cmd_sweep, ensemble, run_sweep, ExperimentConfig, Instance, Preset, TauGrid,
};
use itebe::graph::{
    adjacency_min_eigenvalue, bfs_bipartition, cut_value, maximal_matching, MatchingStrategy,
};
use itebe::itebe::{
    corrected_block_params, generic_block_params, ite_exact_state, run_itebe, BlockParams,
    ProtocolConfig, SimMode,
};
use itebe::metrics::{distribution_metrics, RunStats};
use itebe::rng::substream;
use itebe::Statevector;

enum Verdict {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Verdict::{Fail, Pass, Skip};

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(failures: Vec<String>, summary: String) -> Verdict {
    if failures.is_empty() {
        Pass(summary)
    } else {
        Fail(format!("{summary}; {}", failures.join("; ")))
    }
}

fn within_budget(failures: &mut Vec<String>, start: Instant, budget: Duration) -> f64 {
    let elapsed = start.elapsed();
    if elapsed > budget {
        failures.push(format!(
            "runtime {:.1}s exceeds {:.0}s",
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        ));
    }
    elapsed.as_secs_f64()
}

fn desk() -> ExperimentConfig {
    ExperimentConfig::preset(Preset::Desk)
}

fn ensemble_rows(rows: &[RunStats]) -> impl Iterator<Item = &RunStats> {
    rows.iter().filter(|s| s.graph_id.is_none())
}

/// Per-graph rows keyed by `(n, graph_id)`, each sorted by τ.
fn per_graph_series(rows: &[RunStats], p: usize) -> BTreeMap<(usize, usize), Vec<&RunStats>> {
    let mut out: BTreeMap<(usize, usize), Vec<&RunStats>> = BTreeMap::new();
    for s in rows.iter().filter(|s| s.p == p) {
        if let Some(g) = s.graph_id {
            out.entry((s.n, g)).or_default().push(s);
        }
    }
    for v in out.values_mut() {
        v.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    }
    out
}

fn metric(s: &RunStats, f: impl Fn(&itebe::metrics::MetricIntervals) -> f64) -> f64 {
    s.metrics.as_ref().map(f).unwrap_or(f64::NAN)
}

fn block_identities() -> Verdict {
    let start = Instant::now();
    let mut rng = substream(101, &[]);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for _ in 0..1000 {
        let tk: f64 = rng.random_range(0.0..3.0);
        let g = BlockParams::generic(1.0, tk).unwrap();
        let c = BlockParams::corrected(1.0, tk).unwrap();
        let e2 = (2.0 * tk).exp();
        let mut errs = vec![
            ((2.0 * g.coupling).cos() - (-2.0 * tk).exp()).abs(),
            (g.ancilla_angle - g.sign * g.coupling).abs(),
            (g.normalization - 0.5 * tk.exp()).abs() / g.normalization,
            (c.ancilla_angle - FRAC_PI_4).abs(),
            ((c.ancilla_angle + c.coupling).tan() - e2).abs() / e2,
            (c.coupling - (e2.atan() - FRAC_PI_4)).abs(),
            (c.normalization - ((4.0 * tk).exp() + 1.0).sqrt() / (2.0 * tk.exp())).abs()
                / c.normalization,
        ];
        for p in [g, c] {
            for parity in [1.0, -1.0] {
                let want = 0.5 * (-tk * parity).exp();
                errs.push((p.normalization * p.ancilla_zero_amplitude(parity) - want).abs() / want);
            }
        }
        worst = errs.into_iter().fold(worst, f64::max);
    }
    if worst > 1e-12 {
        failures.push(format!("max deviation {worst:e} > 1e-12"));
    }
    let secs = within_budget(&mut failures, start, Duration::from_secs(1));
    verdict(
        failures,
        format!("1000 draws of τK ∈ [0, 3], max deviation {worst:.1e}, {secs:.3}s"),
    )
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = substream(102, &[]);
    let mut failures = Vec::new();
    let (mut min_fid, mut max_unitary) = (1.0f64, 0.0f64);
    for trial in 0..50 {
        let n = 2 + trial % 5;
        let g = random_graph(n, trial % 3 == 2, &mut rng);
        let psi0 = random_state(n, &mut rng);
        let matching = maximal_matching(&g);
        for tau in [0.25, 1.0, 2.0] {
            let (got, _) = gate_postselected(&g, tau, &psi0, &[]);
            min_fid = min_fid.min(fidelity(&got, &normalized(&tilt(&psi0, &g, tau))));
            let plus = plus_state(n);
            let (got, _) = gate_postselected(&g, tau, &plus, &matching);
            min_fid = min_fid.min(fidelity(&got, &normalized(&tilt(&plus, &g, tau))));

            for e in g.edges() {
                // block gates act on (j, k, ancilla): compare on that 3-qubit register
                for p in [
                    generic_block_params(tau, e.w).unwrap(),
                    corrected_block_params(tau, e.w / 2.0).unwrap(),
                ] {
                    let diff = max_abs_diff(
                        &engine_parity_rotation(2, 0, 1, p.ancilla_angle, p.coupling),
                        &parity_rotation_unitary(2, 0, 1, p.ancilla_angle, p.coupling),
                    );
                    max_unitary = max_unitary.max(diff);
                }
            }
            // embedding at the real qubit positions on registers up to 4 data qubits
            if n <= 4 {
                let e = g.edges()[0];
                let p = generic_block_params(tau, e.w).unwrap();
                let diff = max_abs_diff(
                    &engine_parity_rotation(n, e.j, e.k, p.ancilla_angle, p.coupling),
                    &parity_rotation_unitary(n, e.j, e.k, p.ancilla_angle, p.coupling),
                );
                max_unitary = max_unitary.max(diff);
            }
        }
    }
    if min_fid < 1.0 - 1e-10 {
        failures.push(format!("min fidelity {min_fid}"));
    }
    if max_unitary > 1e-12 {
        failures.push(format!("unitary deviation {max_unitary:e}"));
    }
    let secs = within_budget(&mut failures, start, Duration::from_secs(60));
    verdict(
        failures,
        format!(
            "50 graphs, n ≤ 6, τ ∈ {{0.25, 1, 2}}: min fidelity 1 - {:.1e}, max unitary deviation {max_unitary:.1e}, {secs:.1}s",
            1.0 - min_fid
        ),
    )
}

fn corrected_block_determinism() -> Verdict {
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for tw in [0.0, 0.5, 1.0, 2.0] {
        let p = corrected_block_params(1.0, tw / 2.0).unwrap();
        let mut s = Statevector::init_plus(2).unwrap();
        s.attach_ancilla().unwrap();
        s.apply_parity_ancilla_rotation(0, 1, p.ancilla_angle, p.coupling)
            .unwrap();
        s.apply_cx(2, 0).unwrap();
        let target = normalized(&apply(&zz_propagator(2, 0, 1, tw / 2.0), &plus_state(2)));
        // probability that the ancilla outcome leaves the data register in the target state
        let amps = s.amplitudes();
        let success: f64 = [0usize, 4]
            .iter()
            .map(|&off| {
                let branch = &amps[off..off + 4];
                let weight = norm_sqr(branch);
                weight * fidelity(&normalized(branch), &target)
            })
            .sum();
        let mut lib = Statevector::init_plus(2).unwrap();
        itebe::itebe::apply_corrected_block(&mut lib, 0, 1, &p).unwrap();
        let fid = fidelity(lib.amplitudes(), &target);
        if (success - 1.0).abs() > 1e-12 || fid < 1.0 - 1e-12 {
            failures.push(format!("τw = {tw}: success {success}, fidelity {fid}"));
        }
        details.push(format!("τw={tw}: 1-s={:.0e}", (1.0 - success).abs()));
    }
    verdict(failures, details.join(", "))
}

fn fig3_reproduction() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut lines = Vec::new();

    let cfg = ExperimentConfig {
        per_graph: true,
        ..desk()
    };
    let rows = run_sweep(&cfg).unwrap();
    let generic = run_sweep(&ExperimentConfig {
        matching_first: false,
        per_graph: false,
        ..cfg.clone()
    })
    .unwrap();

    for (&(n, g), series) in &per_graph_series(&rows, 0) {
        for w in series.windows(2) {
            let (a, b) = (w[0].metrics.unwrap(), w[1].metrics.unwrap());
            if b.r.mean < a.r.mean - 1e-12 || b.popt.mean < a.popt.mean - 1e-12 {
                failures.push(format!(
                    "n = {n}, graph {g}: metric decreases at τ = {}",
                    w[1].tau
                ));
            }
        }
    }

    for &n in &cfg.n_list {
        let cell: Vec<&RunStats> = ensemble_rows(&rows).filter(|s| s.n == n).collect();
        let r0 = metric(cell[0], |m| m.r.mean);
        let popt2 = metric(cell.last().unwrap(), |m| m.popt.mean);
        // large-τ limit of the post-selected distribution itself; sampled runs
        // would exhaust any restart budget here
        let instances = ensemble(&cfg, n).unwrap();
        let popt6 = instances
            .iter()
            .map(|inst| exact_popt(inst, 6.0))
            .sum::<f64>()
            / instances.len() as f64;
        let series: Vec<&RunStats> = ensemble_rows(&generic).filter(|s| s.n == n).collect();
        let taus: Vec<f64> = series.iter().map(|s| s.tau).collect();
        let succ: Vec<f64> = series
            .iter()
            .map(|s| metric(s, |m| m.success.mean))
            .collect();
        let strictly = succ.windows(2).all(|w| w[1] < w[0]);
        let r2 = log_linear_r2(&taus, &succ);
        let mf: Vec<f64> = cell.iter().map(|s| metric(s, |m| m.success.mean)).collect();
        let r2_mf = log_linear_r2(&taus, &mf);

        if !(0.5..=0.65).contains(&r0) {
            failures.push(format!("n = {n}: r(0) = {r0:.4}"));
        }
        if popt2 < 0.9 {
            failures.push(format!("n = {n}: p_opt(2) = {popt2:.4} < 0.9"));
        }
        if popt6 < 0.999 {
            failures.push(format!("n = {n}: p_opt(6) = {popt6:.6} < 0.999"));
        }
        if !strictly {
            failures.push(format!(
                "n = {n}: all-generic success rate not strictly decreasing"
            ));
        }
        if r2 < 0.95 {
            failures.push(format!(
                "n = {n}: all-generic log-linear R² = {r2:.4} < 0.95"
            ));
        }
        lines.push(format!(
            "N={n}: r(0)={r0:.3} p_opt(2)={popt2:.3} p_opt(6)={popt6:.5} R²(all-generic)={r2:.3} [matching-first {r2_mf:.3}]"
        ));
    }
    let secs = within_budget(&mut failures, start, Duration::from_secs(600));
    lines.push(format!("{secs:.1}s"));
    verdict(failures, lines.join("; "))
}

fn exact_success(inst: &Instance, tau: f64, matching_first: bool) -> f64 {
    let plus = Statevector::init_plus(inst.graph.n()).unwrap();
    ite_exact_state(
        &inst.graph,
        tau,
        &plus,
        matching_first,
        MatchingStrategy::Greedy,
    )
    .unwrap()
    .1
}

fn exact_popt(inst: &Instance, tau: f64) -> f64 {
    let plus = Statevector::init_plus(inst.graph.n()).unwrap();
    let (state, _) =
        ite_exact_state(&inst.graph, tau, &plus, true, MatchingStrategy::Greedy).unwrap();
    distribution_metrics(&state.data_probabilities(), &inst.cuts, &inst.solution)
        .unwrap()
        .1
}

fn matching_first_benefit() -> Verdict {
    let instances = ensemble(&desk(), 12).unwrap();
    let mut failures = Vec::new();
    let mut ratios = Vec::new();
    for inst in &instances {
        let (with, without) = (
            exact_success(inst, 1.0, true),
            exact_success(inst, 1.0, false),
        );
        if with <= without {
            failures.push(format!("graph {}: {with:e} <= {without:e}", inst.graph_id));
        }
        ratios.push(with / without);
    }
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(
        failures,
        format!(
            "{} graphs at N = 12, τ = 1: min success gain ×{min:.1}",
            instances.len()
        ),
    )
}

fn schedule_path() -> Option<PathBuf> {
    match std::env::var("ITEBE_SCHEDULE") {
        Ok(p) if p.is_empty() => None,
        Ok(p) => Some(PathBuf::from(p)),
        Err(_) => {
            let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/u3r_fixed_angles.json");
            p.exists().then_some(p)
        }
    }
}

fn fig4_reproduction() -> Verdict {
    let Some(path) = schedule_path() else {
        return Skip("no angle file supplied".into());
    };
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    let cfg = ExperimentConfig {
        p_list: vec![0, 4, 8],
        tau_grid: TauGrid::new(0.0, 2.0, 2).unwrap(),
        schedule_path: Some(path),
        per_graph: true,
        ..desk()
    };
    let rows = run_sweep(&cfg).unwrap();
    for &n in &cfg.n_list {
        let r: Vec<f64> = cfg
            .p_list
            .iter()
            .map(|&p| {
                ensemble_rows(&rows)
                    .find(|s| s.n == n && s.p == p && s.tau == 0.0)
                    .map(|s| metric(s, |m| m.r.mean))
                    .unwrap()
            })
            .collect();
        if !(r[0] < r[1] && r[1] < r[2]) {
            failures.push(format!("N = {n}: r(τ=0) over p = 0, 4, 8 is {r:?}"));
        }
        lines.push(format!(
            "N={n}: r(τ=0) p0/4/8 = {:.3}/{:.3}/{:.3}",
            r[0], r[1], r[2]
        ));
    }
    let at = |p: usize| -> BTreeMap<usize, f64> {
        rows.iter()
            .filter(|s| s.n == 12 && s.p == p && s.tau == 2.0)
            .filter_map(|s| s.graph_id.map(|g| (g, metric(s, |m| m.success.mean))))
            .collect()
    };
    let base = at(0);
    for p in [4, 8] {
        let other = at(p);
        let wins = base.iter().filter(|(g, s0)| other[g] > **s0).count();
        let frac = wins as f64 / base.len() as f64;
        let mean_ratio = base.iter().map(|(g, s0)| other[g] / s0).sum::<f64>() / base.len() as f64;
        if frac < 0.9 {
            failures.push(format!(
                "p = {p}: success above p = 0 on {wins}/{} graphs",
                base.len()
            ));
        }
        lines.push(format!(
            "N=12 τ=2 p={p}: success > p=0 on {wins}/{} graphs, mean ratio ×{mean_ratio:.2}",
            base.len()
        ));
    }
    verdict(failures, lines.join("; "))
}

fn bipartite_suite() -> Verdict {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    let bip_cfg = ExperimentConfig {
        bipartite: true,
        graph_count: 10,
        tau_grid: TauGrid::single(1.0),
        ..desk()
    };
    let u3r_cfg = ExperimentConfig {
        tau_grid: TauGrid::single(1.0),
        ..desk()
    };
    let mut total = 0;
    for &n in &bip_cfg.n_list {
        for inst in ensemble(&bip_cfg, n).unwrap() {
            total += 1;
            if !inst.connected {
                continue;
            }
            let half_edges = 3.0 * n as f64 / 2.0;
            let bfs = bfs_bipartition(&inst.graph).map(|a| cut_value(&inst.graph, &a).unwrap());
            if bfs != Some(inst.solution.c_max) || inst.solution.c_max != half_edges {
                failures.push(format!(
                    "N = {n} graph {}: bfs {bfs:?}, c_max {}",
                    inst.graph_id, inst.solution.c_max
                ));
            }
            let eig = adjacency_min_eigenvalue(&inst.graph).unwrap();
            if (eig + 3.0).abs() > 1e-6 {
                failures.push(format!(
                    "N = {n} graph {}: min eigenvalue {eig}",
                    inst.graph_id
                ));
            }
        }
    }
    let bip = run_sweep(&bip_cfg).unwrap();
    let u3r = run_sweep(&u3r_cfg).unwrap();
    for &n in &bip_cfg.n_list {
        let get = |rows: &[RunStats]| {
            ensemble_rows(rows)
                .find(|s| s.n == n)
                .map(|s| metric(s, |m| m.popt.mean))
                .unwrap()
        };
        let (b, u) = (get(&bip), get(&u3r));
        if b <= u {
            failures.push(format!("N = {n}: bipartite p_opt {b:.4} <= u3R {u:.4}"));
        }
        lines.push(format!("N={n}: p_opt(τ=1) bipartite {b:.3} vs u3R {u:.3}"));
    }
    verdict(
        failures,
        format!("{total} bipartite graphs; {}", lines.join("; ")),
    )
}

fn sampling_consistency() -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let shots = 10_000;
    let instances = ensemble(&desk(), 8).unwrap();
    for inst in instances.iter().take(5) {
        let plus = Statevector::init_plus(8).unwrap();
        let cfg = ProtocolConfig {
            mode: SimMode::GateLevel,
            shots,
            ..ProtocolConfig::default()
        };
        let run = run_itebe(
            &inst.graph,
            1.0,
            &plus,
            &cfg,
            &mut substream(108, &[inst.graph_id as u64]),
        )
        .unwrap();
        let (state, s) =
            ite_exact_state(&inst.graph, 1.0, &plus, true, MatchingStrategy::Greedy).unwrap();
        let probs = state.data_probabilities();
        let (r, popt) = distribution_metrics(&probs, &inst.cuts, &inst.solution).unwrap();
        let c_max = inst.solution.c_max;
        let var_r = probs
            .iter()
            .zip(&inst.cuts)
            .map(|(p, c)| p * (c / c_max - r).powi(2))
            .sum::<f64>();

        let samples: Vec<_> = run.kept().collect();
        let kept = samples.len() as f64;
        let attempts = kept + run.total_restarts() as f64;
        let r_hat = samples
            .iter()
            .map(|a| inst.cuts[a.bits() as usize])
            .sum::<f64>()
            / kept
            / c_max;
        let popt_hat = samples.iter().filter(|a| inst.solution.contains(a)).count() as f64 / kept;
        let checks = [
            ("r", r_hat, r, (var_r / kept).sqrt()),
            ("p_opt", popt_hat, popt, (popt * (1.0 - popt) / kept).sqrt()),
            (
                "success",
                run.success_rate,
                s,
                (s * (1.0 - s) / attempts).sqrt(),
            ),
        ];
        for (name, got, want, sigma) in checks {
            let z = (got - want).abs() / sigma;
            worst = worst.max(z);
            if z > 3.0 {
                failures.push(format!(
                    "graph {} {name}: {got:.5} vs {want:.5} ({z:.2}σ)",
                    inst.graph_id
                ));
            }
        }
    }
    let secs = within_budget(&mut failures, start, Duration::from_secs(300));
    verdict(
        failures,
        format!("5 graphs at N = 8, τ = 1, 10^4 shots: worst deviation {worst:.2}σ, {secs:.1}s"),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let base = ExperimentConfig {
        per_graph: true,
        ..desk()
    };
    let run = |name: &str, threads: usize| {
        let cfg = ExperimentConfig {
            out_path: dir.path().join(name),
            ..base.clone()
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| cmd_sweep(&cfg)).unwrap();
        std::fs::read(&cfg.out_path).unwrap()
    };
    let a = run("a.csv", 4);
    let b = run("b.csv", 4);
    let c = run("c.csv", 1);
    let mut failures = Vec::new();
    if a != b {
        failures.push("repeat run differs".into());
    }
    if a != c {
        failures.push("single-thread run differs".into());
    }
    verdict(
        failures,
        format!(
            "desk sweep CSV, {} bytes, identical across runs and 1/4 workers",
            a.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("block identities", block_identities),
        ("oracle equivalence", oracle_equivalence),
        ("corrected-block determinism", corrected_block_determinism),
        ("pure ITE-BE sweep (desk preset)", fig3_reproduction),
        ("matching-first success benefit", matching_first_benefit),
        ("QAOA+ITE-BE sweep", fig4_reproduction),
        ("bipartite 3-regular suite", bipartite_suite),
        ("gate-level vs exact-path sampling", sampling_consistency),
        ("sweep determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Pass(d) => println!("PASS  {name}: {d}"),
            Skip(d) => println!("SKIP  {name}: {d}"),
            Fail(d) => {
                failed += 1;
                println!("FAIL  {name}: {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
