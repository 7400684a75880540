//! Checked-in CLI golden outputs.
//!
//! Each case runs the `multikit` binary from `tests/golden/inputs` and
//! compares standard output (and the peak report, when requested) with the
//! files under `tests/golden/expected`. Setting `MULTIKIT_BLESS=1` rewrites
//! the expected files instead of comparing.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    /// Adds `--peaks <tmp>/peaks.json` and compares that file too.
    pub peaks: bool,
}

const fn case(name: &'static str, args: &'static [&'static str]) -> Case {
    Case { name, args, peaks: false }
}

const fn with_peaks(name: &'static str, args: &'static [&'static str]) -> Case {
    Case { name, args, peaks: true }
}

pub const CASES: &[Case] = &[
    case("mset_union", &["mset", "union", "a.json", "b.json"]),
    case("mset_union_self", &["mset", "union", "a.json", "a.json"]),
    case("mset_intersection", &["mset", "intersection", "a.json", "d.json"]),
    case("mset_sum", &["mset", "sum", "a.json", "d.json"]),
    case("mset_diff_truncated", &["mset", "diff-truncated", "a.json", "d.json"]),
    case("mset_diff_truncated_rev", &["mset", "diff-truncated", "d.json", "a.json"]),
    case("mset_diff", &["mset", "diff", "d.json", "a.json"]),
    case("mset_product", &["mset", "product", "p.json", "q.json"]),
    case("mset_quotient", &["mset", "quotient", "p.json", "q.json"]),
    case("mset_complement", &["mset", "complement", "a.json"]),
    case("mset_scale", &["mset", "scale", "a.json", "--by", "-0.5"]),
    case("fn_sample_gauss", &["fn", "sample", "--name", "gauss_g", "--grid", "-1:1:32"]),
    case("fn_sample_sin", &["fn", "sample", "--name", "sin", "--freq", "2", "--grid", "0:1:16"]),
    case("fn_union", &["fn", "union", "g.csv", "h.csv"]),
    case("fn_intersection", &["fn", "intersection", "g.csv", "h.csv"]),
    case("fn_quotient", &["fn", "quotient", "g.csv", "s.csv"]),
    case("fn_integral", &["fn", "integral", "g.csv"]),
    case("fn_normalize", &["fn", "normalize", "h.csv"]),
    case("fn_resample", &["fn", "resample", "g.csv", "--grid", "-0.5:0.5:8"]),
    case("fn_scale", &["fn", "scale", "g.csv", "--by", "3"]),
    case("sim_jaccard_msets", &["sim", "--kind", "jaccard", "p.json", "q.json"]),
    case("sim_jaccard_multi", &["sim", "--kind", "jaccard", "m1.json", "m2.json", "m3.json"]),
    case("sim_jaccard_functions", &["sim", "--kind", "jaccard", "g.csv", "h.csv"]),
    case("sim_cosine_l2", &["sim", "--kind", "cosine-l2", "g.csv", "s.csv"]),
    case("sim_cosine_sum", &["sim", "--kind", "cosine-sum", "p.json", "q.json"]),
    case("sim_cosine_inter", &["sim", "--kind", "cosine-inter", "g.csv", "s.csv"]),
    case("sim_common", &["sim", "--kind", "common", "g.csv", "s.csv"]),
    case("sim_sup", &["sim", "--kind", "sup", "g.csv", "s.csv"]),
    with_peaks("match_mcorr", &["match", "--mode", "mcorr", "signal.csv", "template.csv"]),
    with_peaks("match_scorr", &["match", "--mode", "scorr", "signal.csv", "template.csv"]),
    with_peaks("match_xcorr", &["match", "--mode", "xcorr", "signal.csv", "template.csv"]),
    with_peaks("match_mconv", &["match", "--mode", "mconv", "signal.csv", "template.csv"]),
    with_peaks("match_scorr_benchmark", &["match", "--mode", "scorr", "--benchmark"]),
    case("transform_walsh", &["transform", "--basis", "walsh", "--k", "3", "w.csv"]),
    case("transform_walsh_literal", &["transform", "--k", "3", "--literal", "w.csv"]),
    case("cluster_points", &["cluster", "points.csv", "--cells", "48"]),
    case("cluster_points_bandwidth", &["cluster", "points.csv", "--bandwidth", "0.4", "--cells", "48"]),
    case("expr_r", &["expr", "(g & h) + g", "--bind", "g=g.csv", "--bind", "h=h.csv"]),
    case("expr_s", &["expr", "g + h | g - h", "--bind", "g=g.csv", "--bind", "h=h.csv"]),
    case("expr_t", &["expr", "(g & h) - (g | h)", "--bind", "g=g.csv", "--bind", "h=h.csv"]),
    case("expr_mset", &["expr", "-(a & d) | 0.5 * a", "--bind", "a=a.json", "--bind", "d=d.json"]),
];

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn bless() -> bool {
    std::env::var_os("MULTIKIT_BLESS").is_some_and(|v| v == "1")
}

fn compare(expected_path: &Path, actual: &[u8]) -> Result<(), String> {
    if bless() {
        fs::write(expected_path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = fs::read(expected_path).map_err(|e| format!("{}: {e}", expected_path.display()))?;
    if expected == actual {
        return Ok(());
    }
    let first = expected
        .iter()
        .zip(actual)
        .position(|(a, b)| a != b)
        .unwrap_or(expected.len().min(actual.len()));
    Err(format!(
        "{} differs at byte {first} (expected {} bytes, got {})",
        expected_path.display(),
        expected.len(),
        actual.len()
    ))
}

pub fn run(case: &Case) -> Result<(), String> {
    let root = root();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let peaks = tmp.path().join("peaks.json");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_multikit"));
    cmd.current_dir(root.join("inputs")).args(case.args);
    if case.peaks {
        cmd.arg("--peaks").arg(&peaks);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{}: exit {:?}: {}",
            case.name,
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let expected = root.join("expected");
    compare(&expected.join(format!("{}.out", case.name)), &out.stdout)?;
    if case.peaks {
        let report = fs::read(&peaks).map_err(|e| e.to_string())?;
        compare(&expected.join(format!("{}.peaks.json", case.name)), &report)?;
    }
    Ok(())
}

/// Runs every case and returns the failures.
pub fn run_all() -> Vec<String> {
    CASES.iter().filter_map(|c| run(c).err()).collect()
}
