use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SKEWED: [&str; 10] = [
    "--model",
    "beta-binomial",
    "--a",
    "0.5",
    "--b",
    "4.0",
    "--n",
    "5",
    "--x",
    "2",
];

fn postedge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_postedge"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = postedge(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn with_skewed(cmd: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(cmd)
        .chain(SKEWED)
        .chain(extra.iter().copied())
        .map(String::from)
        .collect()
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

/// Header and numeric columns of a CSV document.
fn parse_csv(bytes: &[u8]) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i]).collect()
}

fn sup_error(rows: &[Vec<f64>], i: usize) -> f64 {
    rows.iter().map(|r| (r[i] - r[1]).abs()).fold(0.0, f64::max)
}

fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

#[test]
fn compare_ranks_edgeworth_first() {
    let args = with_skewed("compare", &["--order", "3", "--grid", "-3:3:241"]);
    let (header, rows) = parse_csv(&ok(&refs(&args)));
    assert_eq!(
        header,
        [
            "theta",
            "exact",
            "normal",
            "edgeworth",
            "mle_centered",
            "recentered"
        ]
    );
    assert_eq!(rows.len(), 241);
    let (normal, edgeworth, mle) = (
        sup_error(&rows, 2),
        sup_error(&rows, 3),
        sup_error(&rows, 4),
    );
    assert!(edgeworth < normal, "{edgeworth} vs {normal}");
    assert!(edgeworth < mle, "{edgeworth} vs {mle}");
}

#[test]
fn convergence_density_slope() {
    let out = ok(&[
        "convergence",
        "--model",
        "beta-binomial",
        "--a",
        "0.5",
        "--b",
        "4.0",
        "--ratio",
        "0.4",
        "--sweep",
        "5,10,20,40,80,160,320",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_slice(&out).unwrap();
    let slope = v["slopes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["quantity"] == "density_error")
        .unwrap()["slope"]
        .as_f64()
        .unwrap();
    assert!((-1.9..=-1.1).contains(&slope), "slope {slope}");
}

#[test]
fn sweep_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    std::fs::write(&path, "ns = [10, 20, 40, 80]\nratio = 0.4\n").unwrap();
    let base = [
        "convergence",
        "--model",
        "beta-binomial",
        "--a",
        "0.5",
        "--b",
        "4.0",
    ];
    let from_file = ok(&[&base[..], &["--sweep-file", path.to_str().unwrap()]].concat());
    let from_flags = ok(&[&base[..], &["--sweep", "10,20,40,80", "--ratio", "0.4"]].concat());
    assert_eq!(from_file, from_flags);

    std::fs::write(&path, "ns = [10, 20]\nsurprise = 1\n").unwrap();
    let out = postedge(&[&base[..], &["--sweep-file", path.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gaussian_cumulants_row() {
    let out = ok(&[
        "cumulants",
        "--model",
        "normal-normal",
        "--prior-mean",
        "0",
        "--prior-var",
        "1",
        "--noise-var",
        "2",
        "--n",
        "10",
        "--data-mean",
        "0.3",
    ]);
    let mut r = csv::Reader::from_reader(&out[..]);
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["source", "n", "mean", "sd", "kappa3", "kappa4", "kappa5"]
    );
    let rows: Vec<_> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 1);
    for k in rows[0].iter().skip(4) {
        assert_eq!(k.parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = ["a.csv", "b.csv"]
        .iter()
        .map(|f| dir.path().join(f))
        .collect();
    for f in &files {
        let args = with_skewed("compare", &["--output", f.to_str().unwrap()]);
        ok(&refs(&args));
    }
    let a = std::fs::read(&files[0]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(&files[1]).unwrap());
    assert!(!a.contains(&b'\r'));
}

#[test]
fn json_and_csv_agree() {
    let (_, rows) = parse_csv(&ok(&refs(&with_skewed("compare", &[]))));
    let v: Value =
        serde_json::from_slice(&ok(&refs(&with_skewed("compare", &["--format", "json"]))))
            .unwrap();
    let json_rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), json_rows.len());
    let names = [
        "theta",
        "exact",
        "normal",
        "edgeworth",
        "mle_centered",
        "recentered",
    ];
    for (c, j) in rows.iter().zip(json_rows) {
        for (i, name) in names.iter().enumerate() {
            assert_eq!(c[i], j[name].as_f64().unwrap(), "{name}");
        }
    }
}

#[test]
fn theta_densities_have_unit_mass() {
    for cmd in ["compare", "density"] {
        let args = with_skewed(cmd, &["--grid", "-8:8:4001"]);
        let (header, rows) = parse_csv(&ok(&refs(&args)));
        let xs = column(&rows, 0);
        let exact = trapezoid(&xs, &column(&rows, 1));
        let edgeworth = trapezoid(
            &xs,
            &column(&rows, header.iter().position(|h| h == "edgeworth").unwrap()),
        );
        assert!((exact - 1.0).abs() < 0.01, "{cmd}: exact {exact}");
        assert!(
            (edgeworth - 1.0).abs() < 0.01,
            "{cmd}: edgeworth {edgeworth}"
        );
    }
}

#[test]
fn cdf_column_ends_near_one() {
    let (_, rows) = parse_csv(&ok(&refs(&with_skewed("cdf", &["--grid", "-3:12:301"]))));
    let last = rows.last().unwrap();
    assert!((last[1] - 1.0).abs() < 1e-9);
    assert!((last[2] - 1.0).abs() < 1e-6);
}

#[test]
fn empty_grid_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let args = with_skewed(
        "compare",
        &["--grid", "-3:3:0", "--output", path.to_str().unwrap()],
    );
    let out = postedge(&refs(&args));
    assert_eq!(out.status.code(), Some(2));
    assert!(!Path::new(&path).exists());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| postedge(args).status.code();
    assert_eq!(
        code(&[
            "compare",
            "--model",
            "beta-binomial",
            "--a",
            "-1",
            "--b",
            "2",
            "--n",
            "5",
            "--x",
            "2"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "compare",
            "--model",
            "beta-binomial",
            "--a",
            "0.5",
            "--n",
            "5",
            "--x",
            "2"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "compare",
            "--model",
            "beta-binomial",
            "--a",
            "1",
            "--b",
            "1",
            "--n",
            "5",
            "--x",
            "5"
        ]),
        Some(3)
    );
    assert_eq!(
        code(&[
            "cumulants",
            "--model",
            "beta-binomial",
            "--a",
            "0.1",
            "--b",
            "0.1",
            "--n",
            "2",
            "--x",
            "1",
            "--cumulants",
            "laplace"
        ]),
        Some(4)
    );
    let dir = tempfile::tempdir().unwrap();
    let unwritable = dir.path().join("missing").join("out.csv");
    assert_eq!(
        code(&refs(&with_skewed(
            "compare",
            &["--output", unwritable.to_str().unwrap()]
        ))),
        Some(5)
    );
}

#[test]
fn summary_goes_to_stdout_with_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let args = with_skewed(
        "compare",
        &["--format", "json", "--output", path.to_str().unwrap()],
    );
    let stdout = String::from_utf8(ok(&refs(&args))).unwrap();
    assert!(stdout.contains("edgeworth"));
    let v: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["order_k"], 3);
}
