//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any fail.

use std::process::ExitCode;
use std::sync::Arc;

use postedge::edgeworth::{build_series, SeriesKind};
use postedge::models::BuiltinModel;
use postedge::momentalg::{cumulants_to_moments, moments_to_cumulants, CumulantVector};
use postedge::parallel::Execution;
use postedge::posterior::{build_oracle, ModelSpec, Support};
use postedge::quadrature::{integrate, Tolerance};
use postedge::report::{
    compare, convergence, fit_loglog_all, CompareConfig, ConvergenceReport, Grid, GridScale,
    Method, SweepConfig,
};
use postedge::specialfn::{hermite_eval, normal_cdf, normal_pdf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn skewed_model() -> BuiltinModel {
    BuiltinModel::BetaBinomial {
        a: 0.5,
        b: 4.0,
        n: 5,
        x: 2,
    }
}

fn settings() -> Vec<BuiltinModel> {
    let bb = |a, b, n, x| BuiltinModel::BetaBinomial { a, b, n, x };
    let nn = |prior_mean, prior_var, noise_var, n, data_mean| BuiltinModel::NormalNormal {
        prior_mean,
        prior_var,
        noise_var,
        n,
        data_mean,
    };
    let ge = |shape, rate, n, data_mean| BuiltinModel::GammaExponential {
        shape,
        rate,
        n,
        data_mean,
    };
    vec![
        bb(0.5, 4.0, 5, 2),
        bb(1.0, 1.0, 20, 7),
        bb(2.0, 5.0, 50, 31),
        bb(0.7, 0.7, 12, 1),
        nn(0.0, 1.0, 1.0, 10, 0.5),
        nn(2.0, 0.25, 3.0, 40, -1.0),
        nn(-1.0, f64::INFINITY, 0.5, 6, 0.2),
        ge(2.0, 1.0, 8, 0.7),
        ge(0.5, 3.0, 25, 2.5),
        ge(5.0, 0.2, 3, 10.0),
    ]
}

fn two_oracles() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in settings() {
        let exact = m.exact_posterior().unwrap();
        let quad = build_oracle(&m.instantiate().unwrap(), 1e-10).unwrap();
        let (ke, kq) = (exact.kappa(), quad.kappa());
        // zero reference values are compared on their natural unit scale
        let pairs = [
            (quad.mean, exact.mean, exact.sd),
            (quad.sd, exact.sd, 0.0),
            (kq[0], ke[0], 1.0),
            (kq[1], ke[1], 1.0),
        ];
        for (q, e, floor) in pairs {
            worst = worst.max((q - e).abs() / e.abs().max(floor));
        }
    }
    Outcome {
        pass: worst <= 1e-7,
        detail: format!("10 settings, worst relative difference {worst:.2e} (tolerance 1e-7)"),
    }
}

fn small_sample_ranking() -> Outcome {
    let cfg = CompareConfig {
        grid: Grid::new(0.02, 0.7, 341).unwrap(),
        grid_scale: GridScale::Theta,
        ..CompareConfig::new(skewed_model())
    };
    let r = compare(&cfg, Execution::default()).unwrap();
    let sup = |m| r.error(m).unwrap().sup;
    let (e, n, c) = (
        sup(Method::Edgeworth),
        sup(Method::Normal),
        sup(Method::MleCentered),
    );
    Outcome {
        pass: e < n && e < c,
        detail: format!("sup errors: edgeworth {e:.4}, normal {n:.4}, mle-centered {c:.4}"),
    }
}

fn sweep() -> ConvergenceReport {
    let cfg = SweepConfig {
        ratio: Some(0.4),
        ..SweepConfig::new(skewed_model(), vec![10, 20, 40, 80, 160, 320])
    };
    convergence(&cfg, Execution::default()).unwrap()
}

fn slope_in(r: &ConvergenceReport, name: &str, lo: f64, hi: f64) -> (bool, String) {
    let s = r.slope(name).and_then(|s| s.slope).unwrap_or(f64::NAN);
    (
        (lo..=hi).contains(&s),
        format!("{name} {s:.3} in [{lo}, {hi}]"),
    )
}

fn slopes(r: &ConvergenceReport, checks: &[(&str, f64, f64)]) -> Outcome {
    let results: Vec<(bool, String)> = checks
        .iter()
        .map(|&(q, lo, hi)| slope_in(r, q, lo, hi))
        .collect();
    Outcome {
        pass: results.iter().all(|(ok, _)| *ok),
        detail: results
            .into_iter()
            .map(|(ok, s)| if ok { s } else { format!("{s} MISS") })
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn recentering(r: &ConvergenceReport) -> Outcome {
    let tail: Vec<_> = r.points.iter().filter(|p| p.n >= 40).collect();
    let ns: Vec<f64> = tail.iter().map(|p| p.n as f64).collect();
    let ds: Vec<f64> = tail.iter().map(|p| p.recenter_distance).collect();
    let s = fit_loglog_all(&ns, &ds).0.unwrap_or(f64::NAN);
    Outcome {
        pass: s <= -1.0,
        detail: format!("distance slope over n >= 40: {s:.3} (needs <= -1.0)"),
    }
}

fn reparameterized_beta_binomial(scale: f64, shift: f64) -> ModelSpec {
    let (a, b) = (0.5, 4.0);
    let to_theta = move |phi: f64| (phi - shift) / scale;
    ModelSpec::new(
        Arc::new(move |phi: f64| {
            let t = to_theta(phi);
            (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - scale.ln()
        }),
        Arc::new(move |phi: f64, y: f64| {
            let t = to_theta(phi);
            y * t.ln() + (1.0 - y) * (1.0 - t).ln()
        }),
        vec![1.0, 1.0, 0.0, 0.0, 0.0],
        Support::new(shift, shift + scale).unwrap(),
    )
}

fn structural() -> Outcome {
    let mut failed = Vec::new();

    let tol = Tolerance::relative(1e-13);
    let orthogonal = (0..=8).all(|i| {
        (0..=8).all(|j| {
            let v = integrate(
                |x| hermite_eval(i, x).unwrap() * hermite_eval(j, x).unwrap() * normal_pdf(x),
                -14.0,
                14.0,
                tol,
            )
            .value[0];
            let expect = if i == j {
                (1..=i).map(|k| k as f64).product()
            } else {
                0.0
            };
            (v - expect).abs() < 1e-9 * (1.0 + expect)
        })
    });
    if !orthogonal {
        failed.push("hermite orthogonality");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let round_trip = (0..200).all(|_| {
        let mut v: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        v[1] = v[1].abs() + 0.1;
        let c = CumulantVector::new(v.clone()).unwrap();
        let back =
            moments_to_cumulants(&cumulants_to_moments(&c, rng.random_range(-1.0..1.0)).unwrap())
                .unwrap();
        v.iter()
            .zip(back.values())
            .all(|(a, b)| (a - b).abs() < 1e-9)
    });
    if !round_trip {
        failed.push("moment-cumulant round trip");
    }

    let kappas = [[0.6, -0.2, 0.15], [-0.3, 0.5, -0.4], [0.9, 0.4, 0.2]];
    let unit_mass = kappas.iter().all(|&k| {
        (2..=5).all(|order| {
            let s = build_series(k, order, SeriesKind::Density).unwrap();
            (integrate(|x| s.eval(x), -10.0, 10.0, Tolerance::relative(1e-12)).value[0] - 1.0).abs()
                < 1e-9
        })
    });
    if !unit_mass {
        failed.push("unit mass");
    }

    let antiderivative = kappas.iter().all(|&k| {
        let d = build_series(k, 5, SeriesKind::Density).unwrap();
        let c = d.to_cdf().unwrap();
        let h = 1e-5;
        (0..=80).all(|i| {
            let x = -4.0 + 0.1 * i as f64;
            ((c.eval(x + h) - c.eval(x - h)) / (2.0 * h) - d.eval(x)).abs() < 1e-6
        })
    });
    if !antiderivative {
        failed.push("antiderivative identity");
    }

    let gaussian = (2..=5).all(|order| {
        let d = build_series([0.0; 3], order, SeriesKind::Density).unwrap();
        let c = build_series([0.0; 3], order, SeriesKind::Cdf).unwrap();
        (-40..=40).all(|i| {
            let x = 0.2 * i as f64;
            d.eval(x) == normal_pdf(x) && c.eval(x) == normal_cdf(x)
        })
    });
    if !gaussian {
        failed.push("gaussian degeneracy");
    }

    let base = build_oracle(&reparameterized_beta_binomial(1.0, 0.0), 1e-12).unwrap();
    let moved = build_oracle(&reparameterized_beta_binomial(3.0, -1.0), 1e-12).unwrap();
    let sa = build_series(base.kappa(), 3, SeriesKind::Density).unwrap();
    let sb = build_series(moved.kappa(), 3, SeriesKind::Density).unwrap();
    let affine = sa.terms.len() == sb.terms.len()
        && sa.terms.iter().zip(&sb.terms).all(|(a, b)| {
            a.hermite_degree == b.hermite_degree && (a.coefficient - b.coefficient).abs() < 1e-10
        });
    if !affine {
        failed.push("affine invariance");
    }

    Outcome {
        pass: failed.is_empty(),
        detail: if failed.is_empty() {
            "orthogonality, round trip, unit mass, antiderivative, gaussian degeneracy, affine invariance".into()
        } else {
            format!("failed: {}", failed.join(", "))
        },
    }
}

fn main() -> ExitCode {
    let r = sweep();
    let criteria = [
        ("1 two-oracle agreement", two_oracles()),
        ("2 small-sample ranking", small_sample_ranking()),
        (
            "3 density error order",
            slopes(&r, &[("density_error", -1.9, -1.1)]),
        ),
        (
            "4 cdf error order",
            slopes(&r, &[("cdf_error", -1.9, -1.1)]),
        ),
        (
            "5 cumulant orders",
            slopes(
                &r,
                &[
                    ("kappa3_laplace", -0.85, -0.15),
                    ("kappa4_laplace", -1.35, -0.65),
                    ("kappa5_laplace", -1.85, -1.15),
                    ("variance_rel_error", -1.4, -0.6),
                ],
            ),
        ),
        ("6 recentering equivalence", recentering(&r)),
        ("7 structural invariants", structural()),
        (
            "8 comparator coefficient orders",
            slopes(
                &r,
                &[
                    ("c1", -0.85, -0.15),
                    ("c3", -0.85, -0.15),
                    ("c2", -1.35, -0.65),
                    ("c4", -1.35, -0.65),
                    ("c6", -1.35, -0.65),
                ],
            ),
        ),
    ];
    let mut all = true;
    for (name, o) in &criteria {
        all &= o.pass;
        println!(
            "{} criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
