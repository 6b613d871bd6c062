//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::SeedableRng;
use tempfile::TempDir;
use tmscheme::fuzz;
use tmscheme::measures::{report, ReportLimits};
use tmscheme::reduce::reduce_once;
use tmscheme::solve::{min_attractor, min_scheme, SearchLimits};
use tmscheme::words::thue_morse;
use tmscheme::Word;
use tmscheme_oracles as naive;

const BIN: &str = env!("CARGO_BIN_EXE_tmscheme");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn keys(out: &Output) -> HashMap<String, String> {
    String::from_utf8_lossy(&out.stdout)
        .split_whitespace()
        .filter_map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

type Check = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn construct_verify_decode(dir: &Path) -> Check {
    for n in 2..=14u32 {
        let ns = n.to_string();
        let (word, scheme, decoded) = (p(dir, "w"), p(dir, "s"), p(dir, "d"));
        run(&["gen", "-n", &ns, "--out", &word]);
        let c = run(&["construct", "-n", &ns, "--out", &scheme]);
        ensure(keys(&c).get("size") == Some(&(n + 2).to_string()), || format!("n={n}: size != n+2"))?;
        let v = run(&["verify", "--word", &word, "--scheme", &scheme]);
        ensure(v.status.code() == Some(0), || format!("n={n}: verify failed"))?;
        run(&["decode", "--scheme", &scheme, "--out", &decoded]);
        ensure(fs::read(&decoded).ok() == fs::read(&word).ok(), || format!("n={n}: decode differs"))?;
    }
    Ok(())
}

fn small_b(dir: &Path) -> Check {
    for (n, b) in [(2, 4), (3, 5), (4, 6)] {
        let (word, scheme) = (p(dir, "w"), p(dir, "s"));
        run(&["gen", "-n", &n.to_string(), "--out", &word]);
        let out = run(&["solve-b", "--word", &word, "--out", &scheme]);
        ensure(keys(&out).get("b") == Some(&b.to_string()), || format!("t{n}: expected b={b}"))?;
        let v = run(&["verify", "--word", &word, "--scheme", &scheme]);
        ensure(v.status.code() == Some(0), || format!("t{n}: witness invalid"))?;
    }
    Ok(())
}

fn small_gamma(dir: &Path) -> Check {
    for n in [4, 5] {
        let word = p(dir, "w");
        run(&["gen", "-n", &n.to_string(), "--out", &word]);
        let out = run(&["solve-gamma", "--word", &word]);
        ensure(keys(&out).get("gamma").map(String::as_str) == Some("4"), || format!("t{n}: gamma != 4"))?;
        let t = naive::thue_morse(n);
        let witness: Vec<usize> = keys(&out)["witness"].split(',').map(|s| s.parse().unwrap()).collect();
        ensure(naive::attractor_missing(&t, &witness).is_none(), || format!("t{n}: witness not an attractor"))?;
    }
    Ok(())
}

fn lemmas() -> Check {
    let out = run(&["lemmas", "-n", "14"]);
    let k = keys(&out);
    ensure(out.status.code() == Some(0) && k.get("all_pass").map(String::as_str) == Some("true"), || {
        String::from_utf8_lossy(&out.stdout).into_owned()
    })
}

fn reduction(dir: &Path) -> Check {
    for n in 5..=10u32 {
        let ns = n.to_string();
        let (word, scheme) = (p(dir, "w"), p(dir, "s"));
        run(&["gen", "-n", &ns, "--out", &word]);
        run(&["construct", "-n", &ns, "--out", &scheme]);
        let out = run(&["reduce", "--word", &word, "--scheme", &scheme, "-n", &ns, "--out", &p(dir, "r")]);
        let k = keys(&out);
        ensure(out.status.code() == Some(0), || format!("n={n}: reduce failed"))?;
        let levels: usize = k["levels"].parse().unwrap();
        let size_out: usize = k["size_out"].parse().unwrap();
        ensure(size_out + levels <= n as usize + 2, || format!("n={n}: bound missed"))?;
    }
    let mut rng = StdRng::seed_from_u64(0x7e57);
    for n in 5..=8u32 {
        let t = thue_morse(n).unwrap();
        let smaller = thue_morse(n - 1).unwrap();
        for i in 0..1000 {
            let b = fuzz::any_valid(n, &t, &mut rng);
            let r = reduce_once(&b, n).map_err(|e| format!("n={n} #{i}: {e}"))?;
            ensure(r.scheme.is_valid_for(&smaller), || format!("n={n} #{i}: invalid output"))?;
            ensure(r.satisfies_size_bound(), || format!("n={n} #{i}: size bound missed"))?;
        }
    }
    Ok(())
}

fn measures(dir: &Path) -> Check {
    let word = p(dir, "w");
    run(&["gen", "-n", "4", "--out", &word]);
    let k = keys(&run(&["measure", "--word", &word]));
    ensure(k.get("gamma").map(String::as_str) == Some("4"), || "t4: gamma != 4".into())?;
    ensure(k.get("b_exact").map(String::as_str) == Some("6"), || "t4: b != 6".into())?;
    for n in 5..=14u32 {
        run(&["gen", "-n", &n.to_string(), "--out", &word]);
        let k = keys(&run(&["measure", "--word", &word]));
        let gamma: usize = k.get("gamma").or(k.get("gamma_upper")).unwrap().parse().unwrap();
        ensure(gamma <= 4, || format!("t{n}: gamma upper {gamma} > 4"))?;
        let b: usize = k.get("b_exact").or(k.get("b_upper")).unwrap().parse().unwrap();
        ensure(b <= n as usize + 2, || format!("t{n}: b upper {b} > n+2"))?;
    }
    Ok(())
}

fn exhaustive_solvers() -> Check {
    for w in naive::all_words(10) {
        let got = min_scheme(&Word::new(w.clone()).unwrap(), &SearchLimits::for_schemes()).unwrap();
        let want = naive::min_scheme_size(&w);
        ensure(got.exact() == Some(want), || format!("b({}) = {:?}, oracle {want}", show(&w), got.exact()))?;
    }
    for len in 1..=12 {
        for w in naive::all_words(len) {
            let got = min_attractor(&Word::new(w.clone()).unwrap(), &SearchLimits::for_attractors()).unwrap();
            let (size, _) = naive::min_attractor(&w);
            ensure(got.exact() == Some(size), || format!("gamma({}) = {:?}, oracle {size}", show(&w), got.exact()))?;
        }
    }
    Ok(())
}

fn chain() -> Check {
    let mut words: Vec<Vec<u8>> = (1..=10).flat_map(naive::all_words).collect();
    words.extend((2..=4).map(naive::thue_morse));
    for w in words {
        let r = report(&Word::new(w.clone()).unwrap(), &ReportLimits::default()).unwrap();
        ensure(r.chain.iter().all(|c| c.holds == Some(true)), || format!("chain fails on {}", show(&w)))?;
    }
    Ok(())
}

fn show(w: &[u8]) -> String {
    String::from_utf8_lossy(w).into_owned()
}

fn main() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("construct-verify-decode n=2..14", Box::new(|| construct_verify_decode(d))),
        ("solve-b t2..t4 = 4,5,6", Box::new(|| small_b(d))),
        ("solve-gamma t4,t5 = 4", Box::new(|| small_gamma(d))),
        ("lemmas n=14", Box::new(lemmas)),
        ("reduce bound n=5..10 and fuzzed n=5..8", Box::new(|| reduction(d))),
        ("measure t4 and t5..t14", Box::new(|| measures(d))),
        ("exhaustive b (len 10) and gamma (len<=12)", Box::new(exhaustive_solvers)),
        ("measure chain len<=10 and t2..t4", Box::new(chain)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {} {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
