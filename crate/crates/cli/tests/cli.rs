use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use epd::planefile::{self, Plane, Semantic};
use epd_core::synth::random_blobs;
use epd_core::{HardLabelMap, ImagePlane, MultiChannelImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn epd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epd")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = epd(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

fn save(path: &Path, plane: Plane) {
    planefile::save(path, &plane).unwrap();
}

fn hu_image(seed: u64, h: usize, w: usize) -> Plane {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let plane = ImagePlane::new(h, w, (0..h * w).map(|_| r.random_range(-1024.0..2000.0)).collect()).unwrap();
    Plane::image(Semantic::ImageHu, plane)
}

#[test]
fn pgm_gray_values_are_classes() {
    let d = Dir::new();
    let mut bytes = b"P5\n3 2\n4\n".to_vec();
    bytes.extend([0u8, 1, 2, 3, 4, 0]);
    fs::write(d.path("l.pgm"), bytes).unwrap();
    match planefile::load(&d.path("l.pgm")).unwrap() {
        Plane::Hard(h) => {
            assert_eq!(h.num_classes(), 5);
            assert_eq!(h.data(), &[0, 1, 2, 3, 4, 0]);
        }
        other => panic!("loaded {:?}", other.semantic()),
    }
    ok(&["downsample", "--input", &d.arg("l.pgm"), "--factor", "1", "--output", &d.arg("s.bin")]);
    match planefile::load(&d.path("s.bin")).unwrap() {
        Plane::Soft(s) => assert_eq!(s.num_classes(), 5),
        other => panic!("loaded {:?}", other.semantic()),
    }
}

#[test]
fn synth_writes_pgm() {
    let d = Dir::new();
    ok(&["synth", "--shape", "disk", "--size", "32", "--output", &d.arg("disk.pgm")]);
    let bytes = fs::read(d.path("disk.pgm")).unwrap();
    assert!(bytes.starts_with(b"P5\n32 32\n1\n"));
    assert_eq!(bytes.len(), 11 + 32 * 32);
}

#[test]
fn truncated_payload_is_rejected() {
    let d = Dir::new();
    save(&d.path("l.bin"), Plane::Hard(HardLabelMap::filled(8, 8, 2, 1).unwrap()));
    let payload = fs::read(d.path("l.bin")).unwrap();
    fs::write(d.path("l.bin"), &payload[..payload.len() - 3]).unwrap();
    let out = epd(&["downsample", "--input", &d.arg("l.bin"), "--factor", "2", "--output", &d.arg("o.bin")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("payload length mismatch: expected 64 bytes, found 61"), "{}", stderr(&out));
    assert!(!d.path("o.bin").exists());
}

#[test]
fn indivisible_size_suggests_padding() {
    let d = Dir::new();
    save(&d.path("l.bin"), Plane::Hard(HardLabelMap::filled(512, 512, 2, 1).unwrap()));
    let out = epd(&["downsample", "--input", &d.arg("l.bin"), "--factor", "3", "--output", &d.arg("o.bin")]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("height") && msg.contains("513"), "{msg}");

    ok(&["downsample", "--input", &d.arg("l.bin"), "--factor", "3", "--pad", "--output", &d.arg("o.bin")]);
    let sidecar = fs::read_to_string(d.path("o.bin.json")).unwrap();
    assert!(sidecar.replace([' ', '\n'], "").contains("\"padding\":[1,1]"), "{sidecar}");
    match planefile::load(&d.path("o.bin")).unwrap() {
        Plane::Soft(s) => {
            assert_eq!((s.height(), s.width()), (171, 171));
            // last row and column of windows contain one background row/column
            assert_eq!(s.pixel(170, 0), &[1.0 / 3.0, 2.0 / 3.0]);
            assert_eq!(s.pixel(0, 0), &[0.0, 1.0]);
        }
        other => panic!("loaded {:?}", other.semantic()),
    }
}

#[test]
fn invalid_method_combinations_exit_2() {
    let d = Dir::new();
    save(&d.path("l.bin"), Plane::Hard(HardLabelMap::filled(4, 4, 2, 0).unwrap()));
    save(&d.path("i.bin"), hu_image(1, 4, 4));
    let cases: [&[&str]; 4] = [
        &["--input", "l.bin", "--method", "bilinear"],
        &["--input", "i.bin", "--kind", "image", "--method", "nearest"],
        &["--input", "i.bin", "--kind", "label"],
        &["--input", "l.bin", "--factor", "0"],
    ];
    for case in cases {
        let mut args = vec!["downsample".to_string(), "--output".into(), d.arg("o.bin")];
        if !case.contains(&"--factor") {
            args.extend(["--factor".into(), "2".into()]);
        }
        args.extend(case.iter().map(|a| if a.ends_with(".bin") { d.arg(a) } else { a.to_string() }));
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = epd(&args);
        assert_eq!(out.status.code(), Some(2), "{case:?}: {}", stderr(&out));
    }
    assert_eq!(epd(&["downsample", "--bogus"]).status.code(), Some(2));
}

#[test]
fn image_downsampling_keeps_semantic() {
    let d = Dir::new();
    save(&d.path("i.bin"), hu_image(2, 16, 8));
    for method in ["epd", "bilinear"] {
        let out = d.arg(&format!("{method}.bin"));
        ok(&["downsample", "--input", &d.arg("i.bin"), "--kind", "image", "--method", method, "--factor", "4", "--output", &out]);
        let plane = planefile::load(Path::new(&out)).unwrap();
        assert_eq!(plane.semantic(), Semantic::ImageHu);
        assert_eq!(plane.dims(), (4, 2));
    }
}

#[test]
fn pipeline_produces_three_normalized_channels() {
    let d = Dir::new();
    save(&d.path("ct.bin"), hu_image(3, 512, 512));
    ok(&["pipeline", "--input", &d.arg("ct.bin"), "--factor", "4", "--output", &d.arg("a.bin")]);
    ok(&[
        "pipeline",
        "--input",
        &d.arg("ct.bin"),
        "--factor",
        "4",
        "--windows",
        "-190:-30,-29:150,-1000:1000",
        "--output",
        &d.arg("b.bin"),
    ]);
    fs::write(d.path("cfg.toml"), "windows = [[-190, -30], [-29, 150], [-1000, 1000]]\nfactor = 4\n").unwrap();
    ok(&["pipeline", "--input", &d.arg("ct.bin"), "--config", &d.arg("cfg.toml"), "--output", &d.arg("c.bin")]);

    let a = fs::read(d.path("a.bin")).unwrap();
    assert_eq!(a, fs::read(d.path("b.bin")).unwrap());
    assert_eq!(a, fs::read(d.path("c.bin")).unwrap());
    match planefile::load(&d.path("a.bin")).unwrap() {
        Plane::Image { semantic, image } => {
            assert_eq!(semantic, Semantic::ImageNorm);
            assert_eq!(image.channels().len(), 3);
            for ch in image.channels() {
                assert_eq!((ch.height(), ch.width()), (128, 128));
                assert!(ch.data().iter().all(|v| (0.0..=1.0).contains(v)));
            }
        }
        other => panic!("loaded {:?}", other.semantic()),
    }

    let out = epd(&["pipeline", "--input", &d.arg("ct.bin"), "--factor", "4", "--windows", "0:1,0:1", "--output", &d.arg("x.bin")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn loss_eval_identical_labels() {
    let d = Dir::new();
    let mut r = ChaCha8Rng::seed_from_u64(4);
    save(&d.path("y.bin"), Plane::Hard(random_blobs(&mut r, 16, 16, 3, 4)));
    let out = ok(&["loss-eval", "--target", &d.arg("y.bin"), "--pred", &d.arg("y.bin")]);
    assert!(out.contains("l1 value=0.000000 grad_norm=0.000000"), "{out}");
    assert!(out.contains("dice value=0.000000"), "{out}");
    assert!(out.contains("total value=1.386294"), "{out}");
    assert!(out.contains("grad_omega=1.000000,1.000000"), "{out}");
}

#[test]
fn bench_nearest_misses_thin_stripes() {
    let out = ok(&["bench", "--shape", "stripes", "--width", "1", "--size", "64", "--factors", "4"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("method,shape,factor,phase,mass_error,edge_fraction"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().filter(|r| r[0] == "epd").all(|r| r[4] == "0.000000"));
    assert!(rows.iter().any(|r| r[0] == "nearest" && r[4] == "1.000000"));
}

#[test]
fn metrics_on_perfect_prediction() {
    let d = Dir::new();
    let mut r = ChaCha8Rng::seed_from_u64(5);
    save(&d.path("y.bin"), Plane::Hard(random_blobs(&mut r, 24, 24, 3, 5)));
    let csv = ok(&["metrics", "--pred", &d.arg("y.bin"), "--target", &d.arg("y.bin")]);
    assert!(csv.starts_with("# averaging=macro threshold=0.000000 excluded= "), "{csv}");
    let mean = csv.lines().find(|l| l.starts_with("mean,")).unwrap();
    let fields: Vec<&str> = mean.split(',').collect();
    assert!(fields[1..7].iter().all(|v| *v == "1.000000"), "{mean}");

    let json = ok(&["metrics", "--pred", &d.arg("y.bin"), "--target", &d.arg("y.bin"), "--report", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["chosen_threshold"], 0.0);
    assert_eq!(v["average"]["dsc_h"], 1.0);
}

#[test]
fn metrics_excludes_missing_class() {
    let d = Dir::new();
    let target = HardLabelMap::new(2, 2, 3, vec![0, 1, 1, 0]).unwrap();
    let pred = HardLabelMap::new(2, 2, 3, vec![0, 1, 2, 0]).unwrap();
    save(&d.path("t.bin"), Plane::Hard(target));
    save(&d.path("p.bin"), Plane::Hard(pred));
    let csv = ok(&["metrics", "--pred", &d.arg("p.bin"), "--target", &d.arg("t.bin")]);
    assert!(csv.lines().next().unwrap().contains("excluded=2"), "{csv}");
    let row2 = csv.lines().find(|l| l.starts_with("2,")).unwrap();
    assert!(row2.ends_with(",true"), "{row2}");

    let kept = ok(&["metrics", "--pred", &d.arg("p.bin"), "--target", &d.arg("t.bin"), "--keep-missing"]);
    assert!(kept.lines().next().unwrap().contains("excluded= "), "{kept}");
}

#[test]
fn epd_targets_keep_disk_area() {
    let d = Dir::new();
    ok(&["synth", "--shape", "disk", "--size", "256", "--radius", "50.7", "--output", &d.arg("disk.bin")]);
    ok(&["downsample", "--input", &d.arg("disk.bin"), "--factor", "8", "--output", &d.arg("epd.bin")]);
    ok(&["downsample", "--input", &d.arg("disk.bin"), "--factor", "8", "--method", "nearest", "--output", &d.arg("nn.bin")]);
    let truth = match planefile::load(&d.path("disk.bin")).unwrap() {
        Plane::Hard(h) => h.class_counts()[1] as f64,
        _ => unreachable!(),
    };
    let epd_area = match planefile::load(&d.path("epd.bin")).unwrap() {
        Plane::Soft(s) => s.class_mass()[1] * 64.0,
        _ => unreachable!(),
    };
    let nn_area = match planefile::load(&d.path("nn.bin")).unwrap() {
        Plane::Hard(h) => h.class_counts()[1] as f64 * 64.0,
        _ => unreachable!(),
    };
    assert!((epd_area - truth).abs() < 1e-9);
    assert!((nn_area - truth).abs() > 1.0);

    // nearest targets judged against EPD targets: boundary mass is lost
    let csv = ok(&["metrics", "--pred", &d.arg("nn.bin"), "--target", &d.arg("epd.bin")]);
    let row1: Vec<&str> = csv.lines().find(|l| l.starts_with("1,")).unwrap().split(',').collect();
    let dsc_s: f64 = row1[7].parse().unwrap();
    assert!(dsc_s < 1.0 && dsc_s > 0.8, "{dsc_s}");
}

#[test]
fn multi_channel_hu_is_rejected_by_pipeline() {
    let d = Dir::new();
    let plane = |s| ImagePlane::filled(8, 8, s).unwrap();
    let image = MultiChannelImage::new(vec![plane(0.0), plane(1.0)]).unwrap();
    save(&d.path("two.bin"), Plane::Image { semantic: Semantic::ImageHu, image });
    let out = epd(&["pipeline", "--input", &d.arg("two.bin"), "--factor", "2", "--output", &d.arg("o.bin")]);
    assert_eq!(out.status.code(), Some(2));
}
