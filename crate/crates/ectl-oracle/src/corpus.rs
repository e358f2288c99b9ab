//! Emits the generated families to disk in the text formats under stable
//! names, so command-line runs, golden tests and the parser fuzz battery
//! all draw from one corpus.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ectl::text::{write_aut, write_lts};

use crate::families::{gen_fairness_family, gen_micro_tiling, TilingInstance};
use crate::gen;

/// Writes every corpus file into `dir` (which must exist) and returns the
/// paths, sorted by file name.
pub fn write_corpus(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    // The classic fixtures also appear in the emptiness catalogue under the
    // same names; skip re-emitting a path we have already written.
    let emit = |paths: &mut Vec<PathBuf>, name: &str, content: String| -> io::Result<()> {
        let path = dir.join(name);
        if paths.contains(&path) {
            return Ok(());
        }
        fs::write(&path, content)?;
        paths.push(path);
        Ok(())
    };

    for (n, k) in [(0, 1), (3, 2), (4, 3)] {
        let (t, s) = gen_fairness_family(n, k);
        emit(&mut paths, &format!("fairness_T_{n}_{k}.lts"), write_lts(&t))?;
        emit(&mut paths, &format!("fairness_S_{n}_{k}.lts"), write_lts(&s))?;
    }

    // one solvable and one blocked corridor instance
    let solvable = TilingInstance::new(2, 1, &[(0, 0)], &[(0, 0)]).expect("micro scale");
    let blocked = TilingInstance::new(2, 1, &[], &[(0, 0)]).expect("micro scale");
    for (tag, inst) in [("open", &solvable), ("blocked", &blocked)] {
        let (lts, formula, aut) = gen_micro_tiling(inst);
        emit(&mut paths, &format!("tiling_{tag}_2.lts"), write_lts(&lts))?;
        emit(&mut paths, &format!("tiling_{tag}_2.aut"), write_aut(&aut))?;
        emit(&mut paths, &format!("tiling_{tag}_2.ectl"), format!("{formula}\n"))?;
    }

    for aut in [
        gen::vpa_anbn(),
        gen::dpda_anban(),
        gen::dvpa_nbu(),
        gen::pda_odd_len(),
        gen::dpda_even_len(),
    ] {
        emit(&mut paths, &format!("{}.aut", aut.name()), write_aut(&aut))?;
    }
    for fixture in gen::emptiness_catalogue() {
        emit(&mut paths, &format!("{}.aut", fixture.aut.name()), write_aut(&fixture.aut))?;
    }

    emit(&mut paths, "counter_trunc_10.lts", write_lts(&gen::truncated_counter(10)))?;
    emit(&mut paths, "mirror_trunc_10.lts", write_lts(&gen::truncated_mirror(10)))?;
    emit(&mut paths, "chain_100.lts", write_lts(&gen::slope_chain(100)))?;
    emit(&mut paths, "chain_spec.ectl", format!("{}\n", gen::slope_formula()))?;

    for seed in 0..5u64 {
        let mut r = gen::rng(seed);
        let lts = gen::random_lts(&mut r, 8);
        emit(&mut paths, &format!("rnd_sys_{seed}.lts"), write_lts(&lts))?;
        let f = gen::random_plain_formula(&mut r, 4);
        emit(&mut paths, &format!("rnd_plain_{seed}.ectl"), format!("{f}\n"))?;
        let (f, aut) = gen::random_annotated_instance(&mut r);
        emit(&mut paths, &format!("rnd_annotated_{seed}.ectl"), format!("{f}\n"))?;
        emit(&mut paths, &format!("rnd_k4aut_{seed}.aut"), write_aut(&aut))?;
        let nfa = gen::random_finite(&mut r, "rnd_nfa", 6, false, true, &["a", "b"]);
        emit(&mut paths, &format!("rnd_nfa_{seed}.aut"), write_aut(&nfa))?;
        let vpa = gen::random_vpa(&mut r, "rnd_vpa", 5, false);
        emit(&mut paths, &format!("rnd_vpa_{seed}.aut"), write_aut(&vpa))?;
        let pda = gen::random_pda(&mut r, "rnd_pda", 5, false);
        emit(&mut paths, &format!("rnd_pda_{seed}.aut"), write_aut(&pda))?;
    }

    paths.sort();
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ectl::text::{parse_aut, parse_formula, parse_lts};

    #[test]
    fn every_emitted_file_reparses_and_reserializes_identically() {
        let dir = tempfile::tempdir().unwrap();
        let paths = write_corpus(dir.path()).unwrap();
        assert!(paths.len() > 40, "only {} corpus files", paths.len());
        let names: Vec<&str> =
            paths.iter().map(|p| p.file_name().unwrap().to_str().unwrap()).collect();
        assert!(names.contains(&"fairness_T_3_2.lts"));
        assert!(names.contains(&"anbn.aut"));
        assert!(names.contains(&"tiling_open_2.ectl"));
        for path in &paths {
            let src = fs::read_to_string(path).unwrap();
            assert!(src.ends_with('\n'), "{path:?} misses a trailing newline");
            assert!(!src.contains('\r'), "{path:?} is not LF-only");
            match path.extension().and_then(|e| e.to_str()) {
                Some("lts") => {
                    let lts = parse_lts(&src).unwrap_or_else(|e| panic!("{path:?}: {e}"));
                    assert_eq!(write_lts(&lts), src, "{path:?} round-trip");
                }
                Some("aut") => {
                    let aut = parse_aut(&src).unwrap_or_else(|e| panic!("{path:?}: {e}"));
                    assert_eq!(write_aut(&aut), src, "{path:?} round-trip");
                }
                Some("ectl") => {
                    let f = parse_formula(&src).unwrap_or_else(|e| panic!("{path:?}: {e}"));
                    assert_eq!(format!("{f}\n"), src, "{path:?} round-trip");
                }
                other => panic!("unexpected corpus extension {other:?}"),
            }
        }
    }
}
