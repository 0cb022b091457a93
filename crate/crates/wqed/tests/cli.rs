use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_wqed");

const DEVICE: &str = r#"
[device]
ej_max_ghz = 12.7
ec_ghz = 0.59
gamma10_mhz = 73.0
gamma_phi_mhz = 18.0
gamma20_mhz = 145.0
alpha_override_ghz = 0.72
coupling_mode = "radiative"
"#;

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn wqed(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).env_remove("WQED_THREADS").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let i = rdr.headers().unwrap().iter().position(|h| h == name).unwrap();
    rdr.records().map(|r| r.unwrap()[i].parse().unwrap()).collect()
}

fn run_scenario(dir: &Path, name: &str, extra: &[&str]) -> (PathBuf, String) {
    let cfg = scenarios().join(name);
    let out = dir.join(name.replace(".toml", ".csv"));
    let mut args = vec!["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = wqed(dir, &args);
    assert!(o.status.success(), "{name}: {}", stderr(&o));
    (out, String::from_utf8(o.stdout).unwrap())
}

#[test]
fn extinction_sweep_column_contract() {
    let dir = TempDir::new().unwrap();
    let (out, summary) = run_scenario(dir.path(), "extinction.toml", &[]);
    assert_eq!(
        header(&out),
        "power_dbm,photon_number,T_analytic,T_engine,R_analytic,R_engine,power_w,rabi_mhz,\
         t_engine_re,t_engine_im,r_engine_re,r_engine_im"
    );
    let t = column(&out, "T_engine");
    assert_eq!(t.len(), 41);
    assert!((t[0] - 0.11).abs() < 0.005, "{}", t[0]);
    assert!(*t.last().unwrap() > 0.9);
    assert!(summary.contains("wrote="));
    let script = fs::read_to_string(out.with_extension("gp")).unwrap();
    assert!(script.contains("extinction.csv"));
}

#[test]
fn route_pulse_column_contract() {
    let dir = TempDir::new().unwrap();
    let (out, summary) = run_scenario(dir.path(), "route_gaussian.toml", &[]);
    assert!(header(&out).starts_with("t_ns,control_rabi_mhz,T,R,port1_frac,port2_frac"));
    let p1 = column(&out, "port1_frac");
    let p2 = column(&out, "port2_frac");
    let lost = column(&out, "lost_frac");
    for i in 0..p1.len() {
        assert!((p1[i] + p2[i] + lost[i] - 1.0).abs() < 1e-9);
    }
    assert!(summary.contains("T_peak="));
}

#[test]
fn network_scenario_passes_four_rows() {
    let dir = TempDir::new().unwrap();
    let (out, summary) = run_scenario(dir.path(), "network.toml", &[]);
    assert!(summary.contains("pass_rows=4\n"), "{summary}");
    assert!(summary.contains("all_pass=true"));
    let text = fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 1 + 8);
    assert_eq!(text.matches(",PASS,").count(), 4);
}

#[test]
fn missing_required_key_exits_2_naming_it() {
    let dir = TempDir::new().unwrap();
    let text = format!("[scenario]\nkind = \"extinction-sweep\"\n{DEVICE}").replace("gamma10_mhz = 73.0\n", "");
    let cfg = write(dir.path(), "bad.toml", &text);
    let o = wqed(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gamma10_mhz"), "{}", stderr(&o));
}

#[test]
fn configuration_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        format!("[scenario]\nkind = \"extinction-sweep\"\n{DEVICE}\n[sweep]\nvariable = \"photon_number\"\nstart = 1.0\nstop = 1.0\npoints = 3\n"),
        format!("[scenario]\nkind = \"eit-sweep\"\nmystery = 1\n{DEVICE}"),
        format!("[scenario]\nkind = \"route-pulse\"\n{DEVICE}"),
        format!("{DEVICE}\n[spectrum]\nprobe_rabi_mhz = 10.0\n"),
        format!("[scenario]\nkind = \"extinction-sweep\"\n{DEVICE}\n[sweep]\nvariable = \"photon_number\"\nstart = 0.1\nstop = 1.0\npoints = 4\n")
            .replace("coupling_mode = \"radiative\"\n", ""),
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write(dir.path(), &format!("c{i}.toml"), text);
        let o = wqed(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", stderr(&o));
    }
    let cfg = scenarios().join("eit.toml");
    let o = wqed(dir.path(), &["network", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn numerical_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let coarse = format!(
        "[scenario]\nkind = \"route-pulse\"\n{DEVICE}\n[control]\nrabi_mhz = 424.0\nshape = \"gaussian\"\n\
         center_ns = 40.0\nfwhm_ns = 10.0\n\n[time]\nstop_ns = 80.0\nstep_ns = 2.0\n"
    );
    let short = format!("[scenario]\nkind = \"spectrum\"\n{DEVICE}\n[spectrum]\nprobe_rabi_mhz = 100.0\nhorizon_over_gamma = 0.5\n");
    for (i, text) in [coarse, short].iter().enumerate() {
        let cfg = write(dir.path(), &format!("n{i}.toml"), text);
        let o = wqed(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(3), "case {i}: {}", stderr(&o));
    }
}

#[test]
fn reruns_are_byte_identical() {
    for name in ["autler_townes.toml", "fit_power_recovery.toml", "route_square.toml"] {
        let a = TempDir::new().unwrap();
        let b = TempDir::new().unwrap();
        let (pa, sa) = run_scenario(a.path(), name, &[]);
        let (pb, sb) = run_scenario(b.path(), name, &[]);
        assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap(), "{name}");
        assert_eq!(sa.replace(a.path().to_str().unwrap(), ""), sb.replace(b.path().to_str().unwrap(), ""));
    }
}

#[test]
fn thread_count_does_not_change_output() {
    for name in ["fit_onoff_recovery.toml", "extinction.toml", "two_tone_omega12.toml"] {
        let dir = TempDir::new().unwrap();
        let (one, _) = run_scenario(dir.path(), name, &["--threads", "1"]);
        let reference = fs::read(&one).unwrap();
        for n in ["2", "7"] {
            let (many, _) = run_scenario(dir.path(), name, &["--threads", n]);
            assert_eq!(fs::read(many).unwrap(), reference, "{name} with {n} threads");
        }
        let cfg = scenarios().join(name);
        let env_out = dir.path().join("env.csv");
        let o = Command::new(BIN)
            .args(["run", "--config", cfg.to_str().unwrap(), "--out", env_out.to_str().unwrap()])
            .env("WQED_THREADS", "3")
            .output()
            .unwrap();
        assert!(o.status.success());
        assert_eq!(fs::read(env_out).unwrap(), reference);
    }
}

#[test]
fn seed_flag_changes_recovery_trials() {
    let dir = TempDir::new().unwrap();
    let (a, _) = run_scenario(dir.path(), "fit_power_recovery.toml", &[]);
    let first = fs::read(&a).unwrap();
    let (b, _) = run_scenario(dir.path(), "fit_power_recovery.toml", &["--seed", "7"]);
    assert_ne!(fs::read(b).unwrap(), first);
}

#[test]
fn normalized_configs_are_fixed_points() {
    let dir = TempDir::new().unwrap();
    for entry in fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        let o = wqed(dir.path(), &["normalize", "--config", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let once = String::from_utf8(o.stdout).unwrap();
        let copy = write(dir.path(), "copy.toml", &once);
        let o = wqed(dir.path(), &["normalize", "--config", copy.to_str().unwrap()]);
        assert_eq!(String::from_utf8(o.stdout).unwrap(), once, "{}", path.display());
    }
}

#[test]
fn json_output_mirrors_csv_columns() {
    let dir = TempDir::new().unwrap();
    let (csv_out, _) = run_scenario(dir.path(), "eit.toml", &[]);
    let json_out = dir.path().join("rows.json");
    let cfg = scenarios().join("eit.toml");
    let o = wqed(
        dir.path(),
        &["eit-sweep", "--config", cfg.to_str().unwrap(), "--out", json_out.to_str().unwrap(), "--format", "json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(!json_out.with_extension("gp").exists());
    let rows: serde_json::Value = serde_json::from_slice(&fs::read(json_out).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 61);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.join(","), header(&csv_out));
    let t = column(&csv_out, "T_engine");
    for (row, v) in rows.iter().zip(t) {
        assert_eq!(row["T_engine"].as_f64().unwrap(), v);
    }
}

#[test]
fn table_goes_to_stdout_without_a_path() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "[scenario]\nkind = \"onoff-sweep\"\n{DEVICE}\n[circulator]\nr_background = 0.05\n\n\
         [sweep]\nvariable = \"control_rabi_mhz\"\nstart = 100.0\nstop = 500.0\npoints = 5\n"
    );
    let cfg = write(dir.path(), "onoff.toml", &text);
    let o = wqed(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = String::from_utf8(o.stdout.clone()).unwrap();
    assert!(out.starts_with("control_rabi_mhz,R_on_off,T_on_off,R_on_off_engine,T_on_off_engine\n"));
    assert_eq!(out.lines().count(), 6);
    assert!(stderr(&o).contains("routing_points="));
}

#[test]
fn fits_a_dataset_file() {
    let dir = TempDir::new().unwrap();
    // Closed-form transmittance at Γ₁₀ = 73, Γ_φ = 18, k = 2e9 MHz/√W.
    let (g, gp, k) = (73.0_f64, 18.0_f64, 2.0e9_f64);
    let deco = g / 2.0 + gp;
    let r0 = g / (2.0 * deco);
    let mut data = String::from("x,y,weight\n");
    for i in 0..20 {
        let p = 1e-18 * 10f64.powf(i as f64 * 5.0 / 19.0);
        let s = k * k * p / (g * deco);
        data.push_str(&format!("{p:e},{:e},1\n", (1.0 - r0 / (1.0 + s)).powi(2)));
    }
    write(dir.path(), "sweep.csv", &data);
    let text = format!(
        "[scenario]\nkind = \"fit\"\n{DEVICE}\n[fit]\nmodel = \"eq1_power\"\ndata = \"sweep.csv\"\n\
         init_gamma10_mhz = 50.0\ninit_gamma_phi_mhz = 5.0\ninit_coupling_k = 2.0e9\nbootstrap = 20\n\n\
         [output]\npath = \"report.csv\"\n"
    );
    let cfg = write(dir.path(), "fit.toml", &text);
    let o = wqed(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = String::from_utf8(o.stdout).unwrap();
    let value = |key: &str| -> f64 {
        summary.lines().find_map(|l| l.strip_prefix(&format!("{key}="))).unwrap().parse().unwrap()
    };
    assert!((value("gamma10_mhz") / 73.0 - 1.0).abs() < 1e-6);
    assert!((value("gamma_phi_mhz") / 18.0 - 1.0).abs() < 1e-6);
    assert!(summary.contains("converged=true"));
    assert!(value("residual_norm") <= value("initial_residual_norm"));
    assert_eq!(header(&dir.path().join("report.csv")), "parameter,value,uncertainty,free,bootstrap_sigma");

    write(dir.path(), "sweep.csv", "x,y\n1,2\n");
    let o = wqed(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degenerate_fit_exits_3() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "flat.csv", "x,y,weight\n1e-18,0.3,1\n2e-18,0.3,1\n3e-18,0.3,1\n4e-18,0.3,1\n5e-18,0.3,1\n");
    let text = format!("[scenario]\nkind = \"fit\"\n{DEVICE}\n[fit]\nmodel = \"eq1_power\"\ndata = \"flat.csv\"\n");
    let cfg = write(dir.path(), "fit.toml", &text);
    let o = wqed(dir.path(), &["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
