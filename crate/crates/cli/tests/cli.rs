use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use slicegauss::oracle::dense_separable_2d;
use slicegauss::params::{ErrorModel, KernelParams};
use slicegauss::{
    build_autocorr, optimal_constants, quadratic_error, sample_gaussian, Image, DEFAULT_DC_VALUE,
};
use slicegauss_cli::bench::{read_csv, write_csv};
use slicegauss_cli::{kernel_for, BenchRecord, CSV_HEADER};

fn slicegauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slicegauss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = slicegauss(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn constant_image_filters_to_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("c.pgm"), dir.path().join("o.pgm"));
    Image::filled(64, 48, 91.0 / 255.0)
        .write_pgm(&input, 255)
        .unwrap();
    ok(&["filter", s(&input), s(&output), "--sigma", "10", "--k", "3"]);
    assert_eq!(
        std::fs::read(&input).unwrap(),
        std::fs::read(&output).unwrap()
    );
}

#[test]
fn impulse_matches_dense_oracle_at_8_bits() {
    let dir = tempfile::tempdir().unwrap();
    let (input, output) = (dir.path().join("i.pgm"), dir.path().join("o.pgm"));
    ok(&[
        "synth",
        "impulse",
        s(&input),
        "--width",
        "41",
        "--height",
        "37",
    ]);
    ok(&["filter", s(&input), s(&output), "--sigma", "4", "--k", "4"]);

    let (img, _) = Image::read_pgm(&input).unwrap();
    let kernel = kernel_for(4.0, Some(4), None).unwrap();
    let want = dense_separable_2d(&img, &kernel.to_dense())
        .unwrap()
        .encode_pgm(255)
        .unwrap();
    assert_eq!(std::fs::read(&output).unwrap(), want);
}

#[test]
fn parallel_flag_gives_the_same_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    ok(&[
        "synth",
        "one-over-f",
        s(&p("a.pgm")),
        "--width",
        "130",
        "--height",
        "90",
        "--depth",
        "16",
    ]);
    ok(&[
        "filter",
        s(&p("a.pgm")),
        s(&p("seq.pgm")),
        "--sigma",
        "6",
        "--k",
        "5",
    ]);
    ok(&[
        "filter",
        s(&p("a.pgm")),
        s(&p("par.pgm")),
        "--sigma",
        "6",
        "--k",
        "5",
        "--parallel",
    ]);
    assert_eq!(
        std::fs::read(p("seq.pgm")).unwrap(),
        std::fs::read(p("par.pgm")).unwrap()
    );
    assert_eq!(Image::read_pgm(p("par.pgm")).unwrap().1, 65535);
}

#[test]
fn filter_errors_have_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.pgm");
    let out = dir.path().join("o.pgm");
    let r = slicegauss(&["filter", s(&missing), s(&out), "--sigma", "2", "--k", "3"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("missing.pgm"));

    let small = dir.path().join("small.pgm");
    Image::filled(20, 20, 0.5).write_pgm(&small, 255).unwrap();
    let r = slicegauss(&["filter", s(&small), s(&out), "--sigma", "50", "--k", "3"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(!r.stderr.is_empty());
    for bad in [
        &["filter", s(&small), s(&out), "--sigma", "-1", "--k", "3"][..],
        &["filter", s(&small), s(&out), "--sigma", "2", "--k", "7"],
        &["filter", s(&small), s(&out), "--sigma", "2"],
    ] {
        assert_eq!(slicegauss(bad).status.code(), Some(2), "{bad:?}");
    }
    assert!(!out.exists());
}

#[test]
fn params_file_drives_the_filter() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    ok(&["optimize", s(&p("k2.toml")), "--k", "2", "--model", "qf"]);
    let params = KernelParams::load(p("k2.toml")).unwrap();
    assert_eq!((params.k, params.error_model), (2, ErrorModel::Qf));

    ok(&[
        "synth",
        "uniform-noise",
        s(&p("n.pgm")),
        "--width",
        "64",
        "--height",
        "64",
        "--seed",
        "4",
    ]);
    ok(&[
        "filter",
        s(&p("n.pgm")),
        s(&p("o.pgm")),
        "--sigma",
        "3",
        "--params",
        s(&p("k2.toml")),
    ]);
    let (img, _) = Image::read_pgm(p("n.pgm")).unwrap();
    let kernel = kernel_for(3.0, None, Some(&params)).unwrap();
    let want = slicegauss::separable_filter_2d(&img, &kernel)
        .unwrap()
        .encode_pgm(255)
        .unwrap();
    assert_eq!(std::fs::read(p("o.pgm")).unwrap(), want);

    let r = slicegauss(&[
        "filter",
        s(&p("n.pgm")),
        s(&p("o.pgm")),
        "--sigma",
        "3",
        "--k",
        "3",
        "--params",
        s(&p("k2.toml")),
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn k1_l2_fit_is_the_mean_box() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k1.toml");
    ok(&["optimize", s(&path), "--k", "1", "--model", "l2"]);
    let params = KernelParams::load(&path).unwrap();
    let target = sample_gaussian(params.sigma0, 100).unwrap();
    let p = params.breakpoints[0];
    let mean = target.values()[..=p].iter().sum::<f64>() / (p + 1) as f64;
    assert!((params.constants[0] - mean).abs() <= 1e-12 * mean);
    assert_eq!(params.weights, params.constants);
}

#[test]
fn toy_optimize_matches_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.toml");
    ok(&["optimize", s(&path), "--k", "2", "--samples", "13"]);
    let params = KernelParams::load(&path).unwrap();

    let target = sample_gaussian(13.0 / std::f64::consts::PI, 13).unwrap();
    let model = build_autocorr(12, DEFAULT_DC_VALUE).unwrap();
    let mut best = (f64::INFINITY, vec![]);
    for a in 1..=12 {
        for b in a + 1..=12 {
            let part = optimal_constants(&target, &[a, b], &model).unwrap();
            let e = quadratic_error(&target, &part.profile(13), &model).unwrap();
            if e < best.0 {
                best = (e, vec![a, b]);
            }
        }
    }
    assert_eq!(params.breakpoints, best.1);
    assert!((params.e2 - best.0).abs() <= 1e-12 * best.0);
}

#[test]
fn optimize_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.toml");
    for args in [
        &["optimize", s(&path), "--k", "6"][..],
        &["optimize", s(&path), "--k", "0"],
        &["optimize", s(&path), "--k", "3", "--model", "l1"],
        &["optimize", s(&path), "--k", "3", "--samples", "3"],
    ] {
        assert_eq!(slicegauss(args).status.code(), Some(2), "{args:?}");
    }
    assert!(!path.exists());
}

#[test]
fn bench_writes_one_row_per_combination() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    ok(&[
        "synth",
        "one-over-f",
        s(&corpus.join("a.pgm")),
        "--width",
        "256",
        "--height",
        "256",
    ]);
    let csv = dir.path().join("b.csv");
    ok(&[
        "bench",
        s(&corpus),
        "--sigmas",
        "5,20",
        "--ks",
        "3",
        "--reps",
        "3",
        "--methods",
        "slices-qf,exact",
        "--csv",
        s(&csv),
    ]);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = read_csv(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|r| r.method == "slices-qf").count(), 2);
    assert_eq!(rows.iter().filter(|r| r.method == "exact").count(), 2);
    for r in &rows {
        assert_eq!(r.image_id, "a");
        assert!(r.wall_time_ns > 0);
        assert!(r.psnr_db >= 0.0);
        if r.method == "exact" {
            assert_eq!(r.k, 0);
            assert_eq!(r.psnr_db, f64::INFINITY);
        } else {
            assert_eq!((r.k, r.adds_per_px, r.muls_per_px), (3, 12.0, 6.0));
        }
    }
    assert!(text.contains(",inf,"));
}

#[test]
fn bench_parallel_rows_are_tagged() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    ok(&[
        "synth",
        "uniform-noise",
        s(&corpus.join("n.pgm")),
        "--width",
        "96",
        "--height",
        "80",
    ]);
    let out = ok(&[
        "bench",
        s(&corpus),
        "--sigmas",
        "3",
        "--ks",
        "4",
        "--reps",
        "3",
        "--methods",
        "slices-qf",
        "--parallel",
    ]);
    let rows = read_csv(&out.stdout[..]).unwrap();
    let tags: Vec<_> = rows.iter().map(|r| r.method.as_str()).collect();
    assert_eq!(tags, ["slices-qf", "slices-qf+par"]);
    assert_eq!(rows[0].psnr_db, rows[1].psnr_db);
}

#[test]
fn bench_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(slicegauss(&["bench", s(dir.path())]).status.code(), Some(1));
    std::fs::write(dir.path().join("a.pgm"), b"junk").unwrap();
    assert_eq!(
        slicegauss(&["bench", s(dir.path()), "--reps", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        slicegauss(&["bench", s(dir.path()), "--methods", "box"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn synth_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    ok(&[
        "synth",
        "constant",
        s(&p("c.pgm")),
        "--width",
        "16",
        "--height",
        "16",
    ]);
    let (c, _) = Image::read_pgm(p("c.pgm")).unwrap();
    assert_eq!((c.width(), c.height()), (16, 16));
    assert!(c
        .pixels()
        .iter()
        .all(|&v| v == c.pixels()[0] && (v - 0.5).abs() <= 0.5 / 255.0));

    for name in ["a.pgm", "b.pgm"] {
        ok(&[
            "synth",
            "one-over-f",
            s(&p(name)),
            "--width",
            "64",
            "--height",
            "40",
            "--seed",
            "7",
        ]);
    }
    assert_eq!(
        std::fs::read(p("a.pgm")).unwrap(),
        std::fs::read(p("b.pgm")).unwrap()
    );
    assert_eq!(
        slicegauss(&["synth", "plasma", s(&p("x.pgm"))])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        slicegauss(&["synth", "constant", s(&p("x.pgm")), "--depth", "12"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn psnr_command() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    Image::filled(8, 8, 0.0).write_pgm(p("a.pgm"), 255).unwrap();
    Image::filled(8, 8, 51.0 / 255.0)
        .write_pgm(p("b.pgm"), 255)
        .unwrap();
    let out = ok(&["psnr", s(&p("a.pgm")), s(&p("a.pgm"))]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "inf");
    let out = ok(&["psnr", s(&p("a.pgm")), s(&p("b.pgm"))]);
    let db: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((db - 20.0 * (255.0f64 / 51.0).log10()).abs() < 1e-9);
    Image::filled(9, 8, 0.0).write_pgm(p("c.pgm"), 255).unwrap();
    assert_eq!(
        slicegauss(&["psnr", s(&p("a.pgm")), s(&p("c.pgm"))])
            .status
            .code(),
        Some(1)
    );
}

proptest! {
    #[test]
    fn csv_rows_round_trip(
        k in 0usize..6,
        sigma in 0.1f64..100.0,
        ns in 1u64..u64::MAX,
        db in prop_oneof![0.0f64..200.0, Just(f64::INFINITY)],
        adds in 0.0f64..1e4,
        muls in 0.0f64..1e4,
        id in "[a-z0-9_]{1,12}",
    ) {
        let row = BenchRecord {
            method: "slices-qf".into(),
            k,
            sigma,
            image_id: id,
            wall_time_ns: ns,
            psnr_db: db,
            adds_per_px: adds,
            muls_per_px: muls,
        };
        let mut buf = Vec::new();
        write_csv(std::slice::from_ref(&row), &mut buf).unwrap();
        prop_assert_eq!(read_csv(&buf[..]).unwrap(), vec![row]);
    }
}
