//! Exit-code contract and file-format behavior of the `ncd` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nalgebra::DMatrix;
use ncd_core::algebra::Algebra;
use ncd_core::instance::{Family, Instance};
use ncd_core::json::InstanceJson;
use ncd_core::semigroups::{form_from_generator, SuperOperator};
use ncd_core::C64;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncd"))
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncd-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn gen_writes_instances_for_every_family() {
    let dir = tmpdir("gen");
    for (family, nderiv) in [("thm51", 2), ("reim", 1), ("custom-L", 2)] {
        let out = dir.join(format!("{family}.json"));
        let st = run(bin()
            .args(["gen", "--family", family, "--blocks", "2,3", "--nderiv"])
            .arg(nderiv.to_string())
            .args(["--seed", "7", "--out"])
            .arg(&out));
        assert!(st.status.success(), "{family}: {}", String::from_utf8_lossy(&st.stderr));
        let wire: InstanceJson =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let loaded = wire.load().unwrap();
        assert_eq!(loaded.algebra.block_dims(), &[2, 3]);
        if family == "thm51" {
            assert_eq!(loaded.derivations.as_ref().map(Vec::len), Some(2));
            assert!(loaded.coeff_antisym.is_some());
        }
    }
    // thm52 with a harsh coercivity requirement: find a rejecting seed
    let mut saw_rejection = false;
    for seed in 0..120u64 {
        let out = dir.join("t52.json");
        let st = run(bin()
            .args(["gen", "--family", "thm52", "--blocks", "2", "--nderiv", "2"])
            .args(["--coercivity", "0.5", "--seed"])
            .arg(seed.to_string())
            .args(["--out"])
            .arg(&out));
        if !st.status.success() {
            assert_eq!(st.status.code(), Some(2), "rejection must exit 2");
            let err = String::from_utf8_lossy(&st.stderr);
            assert!(err.contains("eigenvalue") || err.contains("coercive"), "witness missing: {err}");
            saw_rejection = true;
            break;
        }
    }
    assert!(saw_rejection, "no draw was rejected at ν = 0.5");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_all_passes_on_generated_instance() {
    let dir = tmpdir("verify");
    let inst = dir.join("inst.json");
    assert!(run(bin()
        .args(["gen", "--family", "thm52", "--blocks", "2,2", "--nderiv", "2", "--seed", "5", "--out"])
        .arg(&inst))
    .status
    .success());
    let report = dir.join("report.json");
    let st = run(bin()
        .args(["verify"])
        .arg(&inst)
        .args(["--check", "all", "--samples", "64", "--out"])
        .arg(&report));
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stdout));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["schema"], "report-v1");
    assert_eq!(rep["overall"], "PASS");
    assert!(rep["results"][0]["checks"].as_array().unwrap().len() >= 10);
    std::fs::remove_dir_all(&dir).ok();
}

/// A Dirichlet instance whose semigroup is positive but not completely
/// positive: generator `Θ - id` with `Θ` the transpose map on one 2x2
/// block. `T_t = e^{-t}(cosh(t)·id + sinh(t)·Θ)` is unital and positive,
/// and its Choi matrix picks up a negative eigenvalue for every t > 0.
fn transpose_channel_instance(path: &Path) {
    let alg = Algebra::factor(2);
    let dim = alg.dim_l2();
    let mut theta = DMatrix::<C64>::zeros(dim, dim);
    for idx in 0..dim {
        theta[(alg.star_index(idx), idx)] = C64::new(1.0, 0.0);
    }
    let id = DMatrix::<C64>::identity(dim, dim);
    let l = SuperOperator::from_matrix(alg.clone(), theta - id).unwrap();
    let inst = Instance {
        label: "transpose-channel".into(),
        seed: 0,
        family: Family::CustomGenerator,
        algebra: alg,
        derivations: None,
        z_list: None,
        coeff_antisym: None,
        coeff_full: None,
        form: form_from_generator(&l),
        generator: l,
    };
    let text = serde_json::to_string_pretty(&InstanceJson::from(&inst)).unwrap();
    std::fs::write(path, text).unwrap();
}

#[test]
fn verify_cp_fails_on_transpose_channel_with_choi_witness() {
    let dir = tmpdir("cp");
    let inst = dir.join("transpose.json");
    transpose_channel_instance(&inst);
    // sub-Markovianity holds...
    let st = run(bin()
        .args(["verify"])
        .arg(&inst)
        .args(["--check", "submarkov", "--samples", "48"]));
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stdout));
    // ...but complete positivity fails, with a Choi witness in the report
    let report = dir.join("report.json");
    let st = run(bin()
        .args(["verify"])
        .arg(&inst)
        .args(["--check", "cp", "--out"])
        .arg(&report));
    assert_eq!(st.status.code(), Some(1));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let checks = rep["results"][0]["checks"].as_array().unwrap();
    let failed = checks.iter().find(|c| c["status"] == "FAIL").unwrap();
    assert_eq!(failed["witness"]["kind"], "choi-vector");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_rejects_malformed_files_with_exit_3() {
    let dir = tmpdir("malformed");
    let path = dir.join("broken.json");
    std::fs::write(&path, "this is not json").unwrap();
    let st = run(bin().args(["verify"]).arg(&path));
    assert_eq!(st.status.code(), Some(3));
    // structurally valid JSON that is not an instance
    std::fs::write(&path, "{\"label\": \"x\"}").unwrap();
    let st = run(bin().args(["verify"]).arg(&path));
    assert_eq!(st.status.code(), Some(3));
    let st = run(bin().args(["triangle"]).arg(dir.join("missing.json")));
    assert_eq!(st.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn triangle_exit_codes_cover_pass_fail_and_corruption() {
    let dir = tmpdir("triangle");
    let inst = dir.join("inst.json");
    assert!(run(bin()
        .args(["gen", "--family", "thm51", "--blocks", "2", "--nderiv", "2", "--seed", "3", "--out"])
        .arg(&inst))
    .status
    .success());
    let st = run(bin().args(["triangle"]).arg(&inst).args(["--samples", "48"]));
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stdout));

    // non-Markovian generator: every leg fails, exit 1
    let bad = dir.join("bad.json");
    assert!(run(bin()
        .args(["gen", "--family", "custom-L", "--blocks", "2", "--nderiv", "1", "--seed", "3", "--out"])
        .arg(&bad))
    .status
    .success());
    let st = run(bin().args(["triangle"]).arg(&bad).args(["--samples", "48"]));
    assert_eq!(st.status.code(), Some(1));

    // corrupted instance: stored generator drifts from the form, exit 4
    let mut wire: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    wire["generator"]["matrix"][0][0][0] = serde_json::json!(3.25);
    let corrupted = dir.join("corrupted.json");
    std::fs::write(&corrupted, serde_json::to_string(&wire).unwrap()).unwrap();
    let st = run(bin().args(["triangle"]).arg(&corrupted));
    assert_eq!(st.status.code(), Some(4));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn named_functions_are_addressable_from_verify() {
    let dir = tmpdir("function");
    let inst = dir.join("inst.json");
    assert!(run(bin()
        .args(["gen", "--family", "thm51", "--blocks", "2", "--nderiv", "2", "--seed", "2", "--out"])
        .arg(&inst))
    .status
    .success());
    for name in ["clip_unit", "abs", "pos_part", "wedge:0.5", "power:3", "smoothstep"] {
        let st = run(bin()
            .args(["verify"])
            .arg(&inst)
            .args(["--check", "sector", "--samples", "24", "--function", name]));
        assert_eq!(st.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&st.stdout));
        let out = String::from_utf8_lossy(&st.stdout).to_string();
        assert!(out.contains(&format!("function-calculus:{name}")));
    }
    let st = run(bin()
        .args(["verify"])
        .arg(&inst)
        .args(["--check", "sector", "--function", "sin"]));
    assert_eq!(st.status.code(), Some(2), "unknown function must be a usage error");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_generates_and_verifies_batches() {
    let dir = tmpdir("sweep");
    let report = dir.join("sweep.json");
    let st = run(bin()
        .args(["sweep", "--family", "thm51", "--count", "4", "--blocks", "2,2"])
        .args(["--nderiv", "2", "--seed", "1", "--check", "dirichlet", "--samples", "48", "--out"])
        .arg(&report));
    assert_eq!(st.status.code(), Some(0), "{}", String::from_utf8_lossy(&st.stderr));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["results"].as_array().unwrap().len(), 4);
    assert_eq!(rep["overall"], "PASS");
    std::fs::remove_dir_all(&dir).ok();
}
