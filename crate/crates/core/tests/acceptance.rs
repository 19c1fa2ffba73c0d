//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any failed.

mod common;

use std::time::{Duration, Instant};

use noma_jspa::channel::{generate_instance, ChannelConfig};
use noma_jspa::jspa::{GradOptions, Prepared};
use noma_jspa::model::{wsr_from_rates, wsr_separable, x_from_p, DecodingOrder, Instance, PowerAllocation};
use noma_jspa::ops::count_ops;
use noma_jspa::single_carrier::{scpc, scus, ActiveSet, IScpc, IScus};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

/// The instance set shared by criteria 1, 5 and 6.
fn oracle_set() -> Vec<Prepared> {
    let mut rng = common::rng(1001);
    (0..100)
        .map(|_| {
            let n = rng.random_range(2..=3);
            let k = rng.random_range(3..=4);
            let m = rng.random_range(1..=2);
            Prepared::new(&common::random_instance(&mut rng, k, n, m, 20))
        })
        .collect()
}

fn c1_oracle_optimality() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in oracle_set() {
        let opt = p.opt_jspa().wsr;
        let brute = p.brute_force_jspa().expect("within size guard").wsr;
        worst = worst.max(common::relative_gap(opt, brute));
    }
    outcome(worst <= 1e-9, format!("100 instances, worst relative gap {worst:.2e}"))
}

fn c2_scus_correctness() -> Outcome {
    let mut rng = common::rng(1002);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let k = rng.random_range(1..=4);
        let m = rng.random_range(1..=k.min(2));
        let c = common::random_carrier(&mut rng, k);
        let p_bar = rng.random_range(0.0..common::P_MAX);
        worst = worst.max(common::relative_gap(scus(&c, m, p_bar).value, common::subset_oracle(&c, m, p_bar)));
    }
    outcome(worst <= 1e-9, format!("200 carriers, worst relative gap {worst:.2e}"))
}

fn c3_scpc_grid_dominance() -> Outcome {
    let mut rng = common::rng(1003);
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for _ in 0..50 {
        let k = rng.random_range(3..=6);
        let c = common::random_carrier(&mut rng, k);
        let p_bar = rng.random_range(0.1..common::P_MAX);
        let size = rng.random_range(1..=3);
        let mut pos: Vec<usize> = (0..k).collect();
        while pos.len() > size {
            pos.remove(rng.random_range(0..pos.len()));
        }
        let s = ActiveSet::new(pos, k).unwrap();
        let v = s.value(&c, &scpc(&c, &s, p_bar));
        let grid = common::ordered_grid_max(&c, &s, p_bar, 1000);
        let margin = (v - grid) / grid.abs().max(1.0);
        min_margin = min_margin.min(margin);
        if margin < -1e-12 {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("50 instances, {violations} violations, min margin {min_margin:.2e}"))
}

fn c4_precompute_equivalence() -> Outcome {
    let mut rng = common::rng(1004);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let k = rng.random_range(1..=6);
        let c = common::random_carrier(&mut rng, k);
        let pos: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.6)).collect();
        let s = ActiveSet::new(pos, k).unwrap();
        let m = rng.random_range(1..=k.min(3));
        let iscpc = IScpc::precompute(&c, s.clone(), common::P_MAX);
        let iscus = IScus::precompute(&c, m, common::P_MAX);
        for _ in 0..100 {
            let p = rng.random_range(0.0..=common::P_MAX);
            worst = worst.max(common::relative_gap(s.value(&c, &iscpc.eval(p)), s.value(&c, &scpc(&c, &s, p))));
            worst = worst.max(common::relative_gap(iscus.value(p), scus(&c, m, p).value));
        }
    }
    outcome(worst <= 1e-9, format!("30 carriers x 100 budgets, worst relative gap {worst:.2e}"))
}

fn c5_fptas_guarantee(set: &[(Prepared, f64)]) -> Outcome {
    let mut violations = 0;
    let mut worst_ratio = f64::INFINITY;
    for (p, opt) in set {
        for eps in [0.5, 0.2, 0.1, 0.05] {
            let s = p.eps_jspa(eps);
            let feasible = s.budgets.check_feasible(p.instance(), 1e-9).is_ok();
            if !feasible || s.wsr < (1.0 - eps) * opt {
                violations += 1;
            }
            if *opt > 0.0 {
                worst_ratio = worst_ratio.min(s.wsr / opt / (1.0 - eps));
            }
        }
    }
    outcome(violations == 0, format!("400 solves, {violations} violations, min value/((1-eps) opt) {worst_ratio:.4}"))
}

fn c6_estimation_bound(set: &[(Prepared, f64)]) -> Outcome {
    let mut violations = 0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (p, opt) in set {
        let u = p.estimate_upper_bound();
        if !(u >= *opt && *opt >= u / 4.0) {
            violations += 1;
        }
        lo = lo.min(opt / u);
        hi = hi.max(opt / u);
    }
    outcome(violations == 0, format!("100 instances, {violations} violations, opt/U in [{lo:.3}, {hi:.3}]"))
}

fn desk_instance(k: usize, m: usize, seed: u64) -> Instance {
    let cfg = ChannelConfig { users: k, subcarriers: 20, max_multiplexed: m, ..Default::default() };
    generate_instance(&cfg, seed).unwrap()
}

fn c7_grad_near_optimality() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for m in 1..=3 {
        let mut losses: Vec<f64> = (0..50)
            .map(|seed| {
                let p = Prepared::new(&desk_instance(10, m, seed));
                assert_eq!(p.instance().levels(), 1000);
                let opt = p.opt_jspa().wsr;
                let grad = p.grad_jspa_with(&GradOptions::new(1e-4)).solution.wsr;
                (opt - grad) / opt
            })
            .collect();
        losses.sort_by(f64::total_cmp);
        let mean = losses.iter().sum::<f64>() / losses.len() as f64;
        let p90 = losses[(0.9 * losses.len() as f64).ceil() as usize - 1];
        ok &= mean <= 1e-3 && p90 <= 5e-3;
        parts.push(format!("M={m} mean {mean:.2e} p90 {p90:.2e}"));
    }
    outcome(ok, parts.join(", "))
}

fn c8_noma_gain() -> Outcome {
    let mut monotone = true;
    let mut gains = Vec::new();
    for seed in 0..20 {
        let base = desk_instance(20, 1, seed);
        let v: Vec<f64> =
            (1..=3).map(|m| Prepared::new(&base.with_max_multiplexed(m).unwrap()).opt_jspa().wsr).collect();
        monotone &= v.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        gains.push((v[2] - v[0]) / v[0]);
    }
    let mean = gains.iter().sum::<f64>() / gains.len() as f64;
    outcome(monotone && mean > 0.0, format!("20 seeds at K=20, monotone {monotone}, mean gain M=3 over M=1 {:.2}%", 100.0 * mean))
}

fn c9_derivative() -> Outcome {
    let mut rng = common::rng(1009);
    let h = 1e-6 * common::P_MAX;
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..20 {
        let k = rng.random_range(1..=5);
        let c = common::random_carrier(&mut rng, k);
        let f = IScus::precompute(&c, k.min(2), common::P_MAX);
        let mut checked = 0;
        while checked < 100 {
            let p = rng.random_range(10.0 * h..=common::P_MAX);
            let d = f.left_derivative(p);
            if common::relative_gap(d, f.left_derivative(p - h)) > 1e-4 {
                skipped += 1;
                continue;
            }
            worst = worst.max(common::relative_gap(d, (f.value(p) - f.value(p - h)) / h));
            checked += 1;
        }
    }
    outcome(worst <= 1e-3, format!("2000 budgets ({skipped} breakpoints skipped), worst relative error {worst:.2e}"))
}

fn c10_discretization_bound() -> Outcome {
    let mut rng = common::rng(1010);
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=3);
        let k = rng.random_range(1..=4);
        let coarse = common::random_instance(&mut rng, k, n, k.min(2), 20);
        let fine = coarse.with_delta(coarse.delta() / 10.0).unwrap();
        let (pc, pf) = (Prepared::new(&coarse), Prepared::new(&fine));
        let vf = pf.opt_jspa();
        let gap = vf.wsr - pc.opt_jspa().wsr;
        let bound: f64 = (0..n).map(|i| coarse.delta() * pf.carrier(i).max_slope(vf.budgets.0[i])).sum();
        if gap > bound + 1e-9 {
            violations += 1;
        }
        max_ratio = max_ratio.max(gap / bound);
    }
    outcome(violations == 0, format!("50 instances, {violations} violations, max gap/bound {max_ratio:.3}"))
}

fn c11_objective_equivalence() -> Outcome {
    let mut rng = common::rng(1011);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let k = rng.random_range(1..=6);
        let n = rng.random_range(1..=4);
        let inst = common::random_instance(&mut rng, k, n, 1, 10);
        let order = DecodingOrder::new(&inst);
        let p = PowerAllocation {
            p: (0..n)
                .map(|_| (0..k).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..2.0) }).collect())
                .collect(),
        };
        let a = wsr_from_rates(&inst, &order, &p);
        let b = wsr_separable(&inst.carriers(), &x_from_p(&p, &order));
        worst = worst.max(common::wsr_gap(&inst, a, b));
    }
    outcome(worst <= 1e-9, format!("1000 allocations, worst relative gap {worst:.2e}"))
}

fn c12_complexity_scaling() -> Outcome {
    let ks = [8usize, 16, 32, 64];
    let scus_ops: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let cfg = ChannelConfig { users: k, subcarriers: 1, max_multiplexed: 2, ..Default::default() };
            let c = generate_instance(&cfg, 5).unwrap().carriers().remove(0);
            count_ops(|| scus(&c, 2, cfg.p_max_w)).1 as f64
        })
        .collect();
    let js = [50usize, 100, 200, 400];
    let opt_ops: Vec<f64> = js
        .iter()
        .map(|&j| {
            let cfg = ChannelConfig {
                users: 3,
                subcarriers: 4,
                max_multiplexed: 2,
                delta_w: 10.0 / j as f64,
                ..Default::default()
            };
            let p = Prepared::new(&generate_instance(&cfg, 5).unwrap());
            count_ops(|| p.opt_jspa()).1 as f64
        })
        .collect();
    let xs = |v: &[usize]| v.iter().map(|&x| x as f64).collect::<Vec<_>>();
    let s1 = common::log_log_slope(&xs(&ks), &scus_ops);
    let s2 = common::log_log_slope(&xs(&js), &opt_ops);
    let ok = (s1 - 2.0).abs() <= 0.3 && (s2 - 2.0).abs() <= 0.3;
    outcome(ok, format!("SCUS slope in K {s1:.3}, opt slope in J {s2:.3}"))
}

fn main() {
    let mut failures = 0;
    let mut run = |id: usize, name: &str, limit: Option<Duration>, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let passed = out.passed && in_time;
        if !passed {
            failures += 1;
        }
        let limit_note = limit.map_or(String::new(), |l| format!(", limit {}s", l.as_secs()));
        println!(
            "{} criterion {id:>2} {name}: {} [{:.1}s{limit_note}]",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    };
    let secs = |s| Some(Duration::from_secs(s));

    run(1, "oracle optimality", secs(60), &mut c1_oracle_optimality);
    run(2, "SCUS correctness", secs(30), &mut c2_scus_correctness);
    run(3, "SCPC grid dominance", secs(60), &mut c3_scpc_grid_dominance);
    run(4, "precompute equivalence", None, &mut c4_precompute_equivalence);
    let set: Vec<(Prepared, f64)> = oracle_set()
        .into_iter()
        .map(|p| {
            let opt = p.opt_jspa().wsr;
            (p, opt)
        })
        .collect();
    run(5, "FPTAS guarantee", None, &mut || c5_fptas_guarantee(&set));
    run(6, "estimation bound", None, &mut || c6_estimation_bound(&set));
    run(7, "gradient near-optimality", secs(900), &mut c7_grad_near_optimality);
    run(8, "NOMA gain trend", None, &mut c8_noma_gain);
    run(9, "derivative check", None, &mut c9_derivative);
    run(10, "discretization bound", None, &mut c10_discretization_bound);
    run(11, "objective equivalence", None, &mut c11_objective_equivalence);
    run(12, "complexity scaling", None, &mut c12_complexity_scaling);

    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
