use std::path::{Path, PathBuf};

use thermolap::{grid_csv, seqfile, spec};
use thermolap_core::heatsim::scenario;
use thermolap_core::{detect_multiscale, DetectConfig, ThermalFrame, ThermalSequence};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["thermolap"];
    argv.extend_from_slice(args);
    let code = thermolap::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn blob_frame() -> ThermalFrame {
    ThermalFrame::from_fn(64, 48, |x, y| {
        let (dx, dy) = (x as f64 - 30.0, y as f64 - 20.0);
        25.0 + 3.0 * (-(dx * dx + dy * dy) / 50.0).exp() + 0.01 * x as f64
    })
    .unwrap()
}

fn small_spec(dir: &Path, with_inclusion: bool) -> PathBuf {
    let inclusion = if with_inclusion {
        "[[inclusion]]\nname = \"c\"\nx = [0.07, 0.13]\ny = [0.07, 0.13]\ndepth = 0.01\nthickness = 0.005\n"
    } else {
        ""
    };
    let text = format!(
        "[slab]\nsize = [0.2, 0.2, 0.08]\nspacing = 0.005\n\n{inclusion}\n\
         [boundary]\nambient = 24.0\nfilm = 20.0\nflux = {{ steps = [[0, 600], [1800, 0]] }}\n\n\
         [run]\nduration = 3600.0\noutput_stride = 20\ninitial_temperature = 24.0\n"
    );
    let p = dir.join(if with_inclusion { "one.toml" } else { "none.toml" });
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn shipped_indoor_spec_matches_preset() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs/indoor.toml");
    assert_eq!(spec::read(&path).unwrap(), scenario::indoor_lab());
}

#[test]
fn detect_matches_library_and_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    grid_csv::write(&input, &blob_frame()).unwrap();
    let map = dir.path().join("map.seq");
    let png = dir.path().join("map.png");
    let (code, out, err) = cli(&[
        "detect",
        s(&input),
        "--sigma",
        "2",
        "--levels",
        "1,2,3,4",
        "--rectify",
        "--out",
        s(&map),
        "--png",
        s(&png),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("rectified"));
    let expect = detect_multiscale(&blob_frame(), &DetectConfig::default()).unwrap();
    let got = seqfile::read(&map).unwrap();
    assert_eq!(got.units, "response");
    assert_eq!(got.sequence.frames()[0].data(), expect.data());
    assert!(png.exists() && dir.path().join("map.png.json").exists());

    // write then read again: bit-exact through both formats
    let again = dir.path().join("again.seq");
    seqfile::write(&again, &got.sequence, "response").unwrap();
    assert_eq!(std::fs::read(&again).unwrap(), std::fs::read(&map).unwrap());
    let csv = dir.path().join("map.csv");
    assert_eq!(cli(&["detect", s(&input), "--out", s(&csv)]).0, 0);
    assert_eq!(grid_csv::read(&csv).unwrap().data(), expect.data());
}

#[test]
fn constant_frame_gives_zero_map_and_black_png() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("flat.csv");
    std::fs::write(&input, "t0,t1,t2,t3\n5,5,5,5\n5,5,5,5\n5,5,5,5\n").unwrap();
    let out = dir.path().join("z.csv");
    let png = dir.path().join("z.png");
    let (code, _, err) = cli(&[
        "detect",
        s(&input),
        "--levels",
        "0",
        "--no-rectify",
        "--out",
        s(&out),
        "--png",
        s(&png),
    ]);
    assert_eq!(code, 0, "{err}");
    let map = grid_csv::read(&out).unwrap();
    assert!(map.data().iter().all(|&v| v.abs() < 1e-12 && v == map.data()[0]));
    let mut reader = png::Decoder::new(std::io::BufReader::new(std::fs::File::open(&png).unwrap()))
        .read_info()
        .unwrap();
    let mut buf = vec![1; reader.output_buffer_size().unwrap()];
    reader.next_frame(&mut buf).unwrap();
    assert!(buf.iter().all(|&b| b == 0));
}

#[test]
fn baselines_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let frames: Vec<ThermalFrame> = (0..32)
        .map(|t| {
            ThermalFrame::from_fn(8, 6, |x, y| {
                30.0 + (t as f64 * 0.3).sin() * (1.0 + 0.1 * x as f64) + 0.05 * y as f64
            })
            .unwrap()
        })
        .collect();
    let seq_path = dir.path().join("seq.seq");
    seqfile::write(&seq_path, &ThermalSequence::new(frames, 5.0).unwrap(), "degC").unwrap();

    let th = dir.path().join("th.csv");
    let (code, out, _) = cli(&[
        "baseline",
        "threshold",
        s(&seq_path),
        "--frame",
        "3",
        "--cutoff",
        "32",
        "--out",
        s(&th),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("of 48 pixels"));
    assert!(grid_csv::read(&th)
        .unwrap()
        .data()
        .iter()
        .all(|&v| v == 0.0 || v == 1.0));

    let km = dir.path().join("km.seq");
    assert_eq!(
        cli(&[
            "baseline",
            "kmeans",
            s(&seq_path),
            "--k",
            "2",
            "--seed",
            "7",
            "--out",
            s(&km)
        ])
        .0,
        0
    );
    assert!(dir.path().join("km.seq.json").exists());

    let ppt = dir.path().join("ppt.seq");
    let (code, out, err) = cli(&[
        "baseline",
        "ppt",
        s(&seq_path),
        "--frequency",
        "0.24e-3",
        "--out",
        s(&ppt),
    ]);
    assert_eq!(code, 0, "{err}");
    // 0.24 mHz * 32 * 5 s = 0.0384 bins, clamped to bin 1
    assert!(out.starts_with("bin 1 at"), "{out}");

    let pct = dir.path().join("pct.seq");
    let (code, out, _) = cli(&["baseline", "pct", s(&seq_path), "--components", "3", "--out", s(&pct)]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    let comps = seqfile::read(&pct).unwrap();
    assert_eq!(comps.sequence.len(), 3);
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("pct.seq.json")).unwrap()).unwrap();
    assert_eq!(report["singular_values"].as_array().unwrap().len(), 32);

    let con = dir.path().join("con.csv");
    assert_eq!(
        cli(&[
            "baseline",
            "contrast",
            s(&seq_path),
            "--sound",
            "30",
            "--delta",
            "2",
            "--out",
            s(&con)
        ])
        .0,
        0
    );
}

#[test]
fn sequence_methods_refuse_single_frames() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    grid_csv::write(&input, &blob_frame()).unwrap();
    let o = dir.path().join("o.seq");
    let (code, _, err) = cli(&["baseline", "ppt", s(&input), "--frequency", "0.01", "--out", s(&o)]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(cli(&["baseline", "pct", s(&input), "--out", s(&o)]).0, 2);
    assert!(!o.exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("o.csv");
    assert_eq!(cli(&["detect", "/nonexistent/in.csv", "--out", s(&o)]).0, 3);
    let bad = dir.path().join("bad.seq");
    std::fs::write(&bad, "THERMOSEQ/1\nwidth 2\n").unwrap();
    assert_eq!(cli(&["detect", s(&bad), "--out", s(&o)]).0, 3);
    assert_eq!(cli(&["detect", "--bogus"]).0, 2);
    assert_eq!(cli(&[]).0, 2);
    assert_eq!(cli(&["--help"]).0, 0);
    let tiny = dir.path().join("tiny.csv");
    std::fs::write(&tiny, "1,2,3\n4,5,6\n7,8,9\n").unwrap();
    let (code, _, err) = cli(&["detect", s(&tiny), "--out", s(&o)]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(cli(&["detect", s(&tiny), "--frame", "1", "--out", s(&o)]).0, 2);
    assert_eq!(
        cli(&["detect", s(&tiny), "--sigma", "-1", "--levels", "0", "--out", s(&o)]).0,
        2
    );
    assert!(!o.exists());

    let spec = small_spec(dir.path(), false);
    let text = std::fs::read_to_string(&spec).unwrap() + "dt = 1000.0\n";
    let unstable = dir.path().join("unstable.toml");
    std::fs::write(&unstable, text).unwrap();
    let seq = dir.path().join("sim.seq");
    assert_eq!(cli(&["simulate", s(&unstable), "--out", s(&seq)]).0, 4);
    assert!(!seq.exists());
    assert_eq!(cli(&["simulate", "--out", s(&seq)]).0, 2);
}

#[test]
fn kernel_dump() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.csv");
    let (code, out, _) = cli(&["kernel", "--sigma", "2", "--out", s(&k)]);
    assert_eq!(code, 0);
    assert!(out.starts_with("17x17 kernel"));
    let f = grid_csv::read(&k).unwrap();
    assert_eq!(f.dims(), (17, 17));
    assert!(f.data().iter().sum::<f64>().abs() < 1e-12);
    let k2 = dir.path().join("k2.csv");
    assert_eq!(
        cli(&[
            "kernel",
            "--sigma",
            "2",
            "--sigma-y",
            "1",
            "--theta",
            "-0.5",
            "--out",
            s(&k2)
        ])
        .0,
        0
    );
}

#[test]
fn homogeneous_simulation_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path(), false);
    let a = dir.path().join("a.seq");
    let b = dir.path().join("b.seq");
    let (code, out, err) = cli(&["simulate", s(&spec), "--out", s(&a)]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("stability limit") && out.contains("relative error"));
    assert_eq!(cli(&["simulate", s(&spec), "--out", s(&b)]).0, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let seq = seqfile::read(&a).unwrap().sequence;
    for f in seq.frames() {
        let (lo, hi) = f
            .data()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        assert!(hi - lo < 1e-9);
    }
    let masks = seqfile::read(&dir.path().join("a.seq.masks")).unwrap();
    assert_eq!(masks.units, "mask");
    assert!(masks.sequence.frames()[0].data().iter().all(|&v| v == 0.0));
}

#[test]
fn profile_peaks_over_simulated_defect() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(dir.path(), true);
    let seq_path = dir.path().join("sim.seq");
    assert_eq!(cli(&["simulate", s(&spec), "--out", s(&seq_path)]).0, 0);
    let seq = seqfile::read(&seq_path).unwrap().sequence;
    let masks_path = dir.path().join("sim.seq.masks");
    let mask = seqfile::read(&masks_path).unwrap().sequence.frames()[0].clone();
    let (w, h) = seq.dims();
    let contrast = |f: &ThermalFrame| {
        let (mut inside, mut ni, mut outside, mut no) = (0.0, 0, 0.0, 0);
        for (v, m) in f.data().iter().zip(mask.data()) {
            if *m > 0.0 {
                inside += v;
                ni += 1;
            } else {
                outside += v;
                no += 1;
            }
        }
        inside / ni as f64 - outside / no as f64
    };
    let peak = (0..seq.len())
        .max_by(|&i, &j| contrast(&seq.frames()[i]).total_cmp(&contrast(&seq.frames()[j])))
        .unwrap();
    assert!(contrast(&seq.frames()[peak]) > 0.0);
    let row = h / 2;
    let csv = dir.path().join("row.csv");
    let frame = peak.to_string();
    let (code, out, err) = cli(&[
        "profile",
        s(&seq_path),
        "--frame",
        &frame,
        "--row",
        &row.to_string(),
        "--masks",
        s(&masks_path),
        "--levels",
        "0,1",
        "--out",
        s(&csv),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("mask1 center at index"));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), w);
    let raw: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    let marker = rows.iter().position(|r| r[4] == "mask1").unwrap();
    let best = (0..w).max_by(|&i, &j| raw[i].total_cmp(&raw[j])).unwrap();
    assert!(best.abs_diff(marker) <= 2, "peak {best}, center {marker}");
    assert!(best > 0 && best < w - 1 && raw[best] >= raw[best - 1] && raw[best] >= raw[best + 1]);

    // column profile of the transposed frame matches the row profile
    let t = seq.frames()[peak].transpose().with_pixel_pitch(Some(0.005)).unwrap();
    let tpath = dir.path().join("t.seq");
    seqfile::write(&tpath, &ThermalSequence::new(vec![t], 1.0).unwrap(), "degC").unwrap();
    let tcsv = dir.path().join("col.csv");
    assert_eq!(
        cli(&[
            "profile",
            s(&tpath),
            "--col",
            &row.to_string(),
            "--levels",
            "0,1",
            "--out",
            s(&tcsv)
        ])
        .0,
        0
    );
    let col: Vec<f64> = std::fs::read_to_string(&tcsv)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(col, raw);
    assert_eq!(cli(&["profile", s(&tpath), "--col", "999", "--out", s(&tcsv)]).0, 2);
}

#[test]
fn diagnose_reports_every_level() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.csv");
    grid_csv::write(&input, &blob_frame()).unwrap();
    let json = dir.path().join("d.json");
    let (code, out, err) = cli(&["diagnose", s(&input), "--max-level", "3", "--out", s(&json)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(out.lines().filter(|l| l.starts_with("level")).count(), 4);
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(v["levels"].as_array().unwrap().len(), 4);
}
