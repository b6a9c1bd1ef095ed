//! One line per acceptance criterion: `PASS`/`FAIL`, number, time, note.
//! Runs without the test harness so the lines always show.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use stringtop::checks::{verify_model, VerifyOptions};
use stringtop::element::elem_mul;
use stringtop::loops::{
    brane_homology, hochschild, intersection_map, prepare_connection, standard_classes, LoopReport,
};
use stringtop::model_io::{parse_model, parse_morphism, preset};
use stringtop::oracle::hochschild_dims_bruteforce;
use stringtop::twisted::{class_of, ring_structure, Coefficients, ComplexSpec};
use stringtop::{scalar, DGAlgebra, Scalar, Space, TwistedElement, Word};

type Outcome = Result<String, String>;

fn models() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_stringtop")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8(out.stdout).unwrap())
}

/// `(degree, dim)` rows of a TSV table.
fn table(tsv: &str) -> BTreeMap<i32, usize> {
    tsv.lines()
        .take_while(|l| !l.starts_with("# ring") && !l.starts_with("# intersection"))
        .filter(|l| !l.starts_with('#') && !l.starts_with("degree") && !l.starts_with("k\t"))
        .map(|l| {
            let mut it = l.split('\t');
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect()
}

fn expect_dims(got: &BTreeMap<i32, usize>, want: impl Fn(i32) -> usize) -> Result<(), String> {
    for (&d, &n) in got {
        if n != want(d) {
            return Err(format!("degree {d}: got {n}, want {}", want(d)));
        }
    }
    Ok(())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn term(a: usize, w: &[usize]) -> TwistedElement {
    TwistedElement::term(Space::Algebra, a, Word::from_letters(w.iter().copied()), scalar::one())
}

fn odd_sphere() -> Outcome {
    let t = table(&cli(&["hochschild", "--model", "sphere:3", "--window", "-8..4"])?);
    ensure(t.len() == 13, "window not covered")?;
    expect_dims(&t, |d| usize::from(d == 3 || d <= 1))?;
    Ok("ℚ[ν,x]/ν² dims over -8..4".into())
}

fn even_sphere() -> Outcome {
    let t = table(&cli(&["hochschild", "--model", "sphere:2", "--window", "-8..4"])?);
    // ℚ[ν,μ,τ]/(ν², μ², νμ, ντ): ν in 2, μτ^k in 1-2k, τ^k in -2k.
    expect_dims(&t, |d| usize::from(d <= 2))?;
    let a = preset("sphere:2").map_err(|e| e.to_string())?;
    let (spec, tab) = hochschild(&a, (-8, 4), false, None).map_err(|e| e.to_string())?;
    let (hd, _) = prepare_connection(&a, None, 0).map_err(|e| e.to_string())?;
    let named = standard_classes(&spec, &hd).map_err(|e| e.to_string())?;
    let mu = &named.iter().find(|(n, _)| n == "mu").ok_or("no mu")?.1;
    let tau = &named.iter().find(|(n, _)| n == "tau").ok_or("no tau")?.1;
    ensure(*mu == term(1, &[0]), "μ is not ν⊗x")?;
    ensure(*tau == term(0, &[0, 0]), "τ is not 1⊗x²")?;
    let ring = ring_structure(&spec, &tab, &named).map_err(|e| e.to_string())?;
    for (x, y) in [("mu", "mu"), ("nu", "mu"), ("nu", "tau"), ("nu", "nu")] {
        ensure(ring.product(x, y).and_then(|p| p.is_zero()) == Some(true), format!("{x}·{y} ≠ 0"))?;
    }
    ensure(ring.product("tau", "tau").and_then(|p| p.is_zero()) == Some(false), "τ² = 0")?;
    Ok("dims and μ²=νμ=ντ=0 on μ=ν⊗x, τ=1⊗x²".into())
}

fn cpn_expected(n: i32, d: i32, span: i32) -> usize {
    let mut count = 0;
    for c in 0..=span {
        for e in 0..=1 {
            let top = if c > 0 || e > 0 { n - 1 } else { n };
            count += (0..=top).filter(|a| 2 * a + e - 2 * n * c == d).count();
        }
    }
    count
}

fn projective() -> Outcome {
    for n in 1..=3i32 {
        let (lo, hi) = (-(2 * n + 4), 2 * n);
        let w = format!("{lo}..{hi}");
        let t = table(&cli(&["hochschild", "--model", &format!("cpn:{n}"), "--window", &w])?);
        expect_dims(&t, |d| cpn_expected(n, d, 8)).map_err(|e| format!("cpn:{n} {e}"))?;
        let a = preset(&format!("cpn:{n}")).map_err(|e| e.to_string())?;
        let (spec, tab) = hochschild(&a, (lo, hi), false, None).map_err(|e| e.to_string())?;
        let (hd, _) = prepare_connection(&a, None, 0).map_err(|e| e.to_string())?;
        let mut named = standard_classes(&spec, &hd).map_err(|e| e.to_string())?;
        if n == 1 {
            // ℂP¹ is named as the 2-sphere: its ν is h and its τ is ν.
            for (k, _) in named.iter_mut() {
                *k = match k.as_str() {
                    "nu" => "h".into(),
                    "tau" => "nu".into(),
                    _ => k.clone(),
                };
            }
        }
        let nu = &named.iter().find(|(k, _)| k == "nu").ok_or("no nu")?.1;
        // The 1⊗ part of ν is the word sum Σ x_i x_j.
        for i in 1..=n as usize {
            let key = (0, Word::from_letters([i - 1, n as usize - i]));
            ensure(nu.coeff(&key) == scalar::one(), format!("ν does not contain the word sum: {}", spec.format(nu)))?;
        }
        named.push(("hn".into(), term(n as usize, &[])));
        let ring = ring_structure(&spec, &tab, &named).map_err(|e| e.to_string())?;
        for (x, y) in [("hn", "h"), ("hn", "mu"), ("hn", "nu"), ("mu", "mu")] {
            ensure(ring.product(x, y).and_then(|p| p.is_zero()) == Some(true), format!("cpn:{n}: {x}·{y} ≠ 0"))?;
        }
        if n > 1 {
            for (x, y) in [("h", "mu"), ("h", "nu")] {
                ensure(ring.product(x, y).and_then(|p| p.is_zero()) == Some(false), format!("cpn:{n}: {x}·{y} = 0"))?;
            }
        }
    }
    Ok("n = 1, 2, 3 dims and h^{n+1}=h^nμ=h^nν=0".into())
}

fn brane() -> Outcome {
    let map = models().join("linear.dgmap");
    let tsv = cli(&[
        "brane", "--model", "cpn:2", "--sub", "cpn:1", "--map", map.to_str().unwrap(), "--top-degree", "2", "--window",
        "-8..4", "--intersection",
    ])?;
    ensure(tsv.contains("# intersection"), "no intersection rows")?;
    let m = preset("cpn:2").map_err(|e| e.to_string())?;
    let z = preset("cpn:1").map_err(|e| e.to_string())?;
    let f = parse_morphism(&std::fs::read_to_string(&map).unwrap(), &m, &z).map_err(|e| e.to_string())?;
    let b: LoopReport = brane_homology(&f, 2, (-8, 4), None).map_err(|e| e.to_string())?;
    // ℚ[h,ν,x]/(h², x²), |h| = 2, |ν| = -4, |x| = -1.
    let want = |d: i32| (0..4).map(|c| [0, 2, -1, 1].iter().filter(|&&e| e - 4 * c == d).count()).sum::<usize>();
    let dims: BTreeMap<i32, usize> = b.table.dims().into_iter().collect();
    expect_dims(&dims, want)?;
    let (hd, conn) = prepare_connection(&m, None, 0).map_err(|e| e.to_string())?;
    let src = ComplexSpec::new(m.clone(), Coefficients::Algebra, conn, (-8, 4)).map_err(|e| e.to_string())?;
    let x = b.table.entry(-1).ok_or("no degree -1")?.reps[0].clone();
    let h = term(1, &[]);
    let hx = elem_mul(&z, b.spec.generators(), &h, &x).map_err(|e| e.to_string())?;
    let (_, hx_class) = class_of(&b.spec, &b.table, &hx).map_err(|e| e.to_string())?;
    let (_, h_class) = class_of(&b.spec, &b.table, &h).map_err(|e| e.to_string())?;
    for (name, rep) in standard_classes(&src, &hd).map_err(|e| e.to_string())? {
        let (deg, img) = intersection_map(&f, &src, &b, &rep).map_err(|e| e.to_string())?;
        match name.as_str() {
            "h" => ensure(img == h_class, "h ↦ h fails")?,
            "mu" => ensure(img == hx_class, "μ ↦ hx fails")?,
            "nu" => ensure(deg == -4 && !img.is_zero() && b.table.dim(-4) == Some(1), "ν ↦ ν fails")?,
            _ => {}
        }
    }
    Ok("ℚ[h,ν,x]/h² dims; h↦h, ν↦ν, μ↦hx".into())
}

fn num_is_zero(q: &Scalar) -> bool {
    *q == scalar::zero()
}

/// Kernel minus image dimensions of ð on words, by plain Gaussian elimination.
fn brute_based(a: &DGAlgebra, lo: i32) -> BTreeMap<i32, usize> {
    let (_, conn) = prepare_connection(a, Some(8), 8).unwrap();
    let gens = conn.generators();
    let words = |d: i32| gens.words_of_degree(d, 8);
    let rank = |from: &[Word], to: &[Word]| -> usize {
        let mut rows: Vec<Vec<Scalar>> = from
            .iter()
            .map(|w| {
                let mut row = vec![scalar::zero(); to.len()];
                for (v, c) in conn.eth().apply_word(gens, w) {
                    if let Some(j) = to.iter().position(|u| *u == v) {
                        row[j] += c;
                    }
                }
                row
            })
            .collect();
        let mut r = 0;
        for col in 0..to.len() {
            let Some(p) = (r..rows.len()).find(|&i| !num_is_zero(&rows[i][col])) else { continue };
            rows.swap(r, p);
            let pivot = rows[r][col].clone();
            for i in 0..rows.len() {
                if i != r && !num_is_zero(&rows[i][col]) {
                    let f = &rows[i][col] / &pivot;
                    let sub: Vec<Scalar> = rows[r].iter().map(|x| x * &f).collect();
                    for (x, y) in rows[i].iter_mut().zip(sub) {
                        *x -= y;
                    }
                }
            }
            r += 1;
        }
        r
    };
    (lo..=0)
        .map(|d| {
            let (w0, w1, wm) = (words(d), words(d + 1), words(d - 1));
            (-d, w0.len() - rank(&w0, &w1) - rank(&wm, &w0))
        })
        .collect()
}

fn based() -> Outcome {
    for n in 2..=5i32 {
        let t = table(&cli(&["based", "--model", &format!("sphere:{n}"), "--window", "-16..0"])?);
        expect_dims(&t, |k| usize::from(k % (n - 1) == 0)).map_err(|e| format!("sphere:{n} {e}"))?;
    }
    for n in 1..=3 {
        let t = table(&cli(&["based", "--model", &format!("cpn:{n}"), "--window", "-8..0"])?);
        let brute = brute_based(&preset(&format!("cpn:{n}")).unwrap(), -8);
        ensure(t == brute, format!("cpn:{n}: {t:?} vs {brute:?}"))?;
    }
    Ok("spheres at k(n-1); ℂPⁿ equals brute-force ð kernel/rank".into())
}

fn oracle() -> Outcome {
    for (name, top) in [("sphere:2", 2), ("sphere:3", 3), ("cpn:1", 2), ("cpn:2", 4), ("product(sphere:2,sphere:3)", 5)] {
        let a = preset(name).map_err(|e| e.to_string())?;
        for dual in [false, true] {
            let brute = hochschild_dims_bruteforce(&a, (-6, top), dual).map_err(|e| e.to_string())?;
            let (_, t) = hochschild(&a, (-6, top), dual, None).map_err(|e| e.to_string())?;
            ensure(brute.dims == t.dims(), format!("{name} dual={dual}"))?;
        }
    }
    Ok("5 models, A and A* coefficients".into())
}

fn rescaled(n: usize, lam: [i64; 4]) -> DGAlgebra {
    let mut mult = Vec::new();
    for i in 1..=n {
        for j in 1..=n - i {
            let (num, den) = (lam[i] * lam[j], lam[i + j]);
            let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
            mult.push(format!("e{i}*e{j} = {num}/{den} e{}", i + j).replace("= -", "= -"));
        }
    }
    let basis: Vec<String> = std::iter::once("1:0".to_string()).chain((1..=n).map(|i| format!("e{i}:{}", 2 * i))).collect();
    let mult = if mult.is_empty() { String::new() } else { format!("mult: {};", mult.join(", ")) };
    parse_model(&format!("model r {{ basis: {}; unit: 1; {mult} }}", basis.join(", "))).unwrap()
}

fn properties() -> Outcome {
    let mut models: Vec<(String, DGAlgebra, Option<i32>)> = Vec::new();
    for (name, top) in [("sphere:2", 2), ("sphere:3", 3), ("cpn:2", 4), ("cpn:3", 6), ("product(sphere:2,sphere:3)", 5)] {
        models.push((name.into(), preset(name).unwrap(), Some(top)));
    }
    for (n, lam) in [(2, [1, 2, -3, 1]), (3, [1, -1, 3, 2]), (3, [1, 2, 2, -1])] {
        models.push((format!("rescaled cpn:{n} {lam:?}"), rescaled(n, lam), Some(2 * n as i32)));
    }
    let fat = parse_model("model fat { basis: 1:0, v:2, u:3, w:4; unit: 1; diff: u -> w; mult: v*v = w; }").unwrap();
    models.push(("fat s2".into(), fat, None));
    let mut checks = 0;
    for (name, a, top) in &models {
        let opts = VerifyOptions { oracle: false, poincare: *top, max_len: None };
        for r in verify_model(a, (-6, top.unwrap_or(4)), &opts).map_err(|e| format!("{name}: {e}"))? {
            ensure(r.passed, format!("{name} {}: {}", r.name, r.detail))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks on {} models", models.len()))
}

fn determinism() -> Outcome {
    let map = models().join("linear.dgmap");
    let runs: Vec<Vec<&str>> = vec![
        vec!["hochschild", "--model", "cpn:3", "--window", "-10..6", "--ring", "--format", "json"],
        vec!["loops", "--model", "sphere:3", "--top-degree", "3", "--window", "-6..4", "--ring", "--format", "json"],
        vec!["brane", "--model", "cpn:2", "--sub", "cpn:1", "--map", map.to_str().unwrap(), "--top-degree", "2", "--window", "-8..4", "--intersection", "--format", "json"],
        vec!["verify", "--model", "product(sphere:2,sphere:3)", "--window", "-6..5", "--oracle"],
    ];
    for args in &runs {
        let first = cli(args)?;
        let again = cli(args)?;
        let mut single = vec!["--threads", "1"];
        single.extend(args.iter().copied());
        let mut many = vec!["--threads", "8"];
        many.extend(args.iter().copied());
        ensure(first == again && first == cli(&single)? && first == cli(&many)?, format!("{} differs", args[0]))?;
    }
    Ok(format!("{} commands, repeated and with 1 and 8 threads", runs.len()))
}

fn main() {
    let criteria: Vec<(u32, &str, Duration, fn() -> Outcome)> = vec![
        (1, "odd sphere Hochschild", Duration::from_secs(5), odd_sphere),
        (2, "even sphere Hochschild and ring", Duration::from_secs(5), even_sphere),
        (3, "projective spaces", Duration::from_secs(60), projective),
        (4, "brane CP1 in CP2 and intersection", Duration::from_secs(30), brane),
        (5, "based loops", Duration::from_secs(10), based),
        (6, "oracle equivalence", Duration::from_secs(300), oracle),
        (7, "property suites", Duration::from_secs(120), properties),
        (8, "determinism", Duration::from_secs(600), determinism),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (ok, note) = match outcome {
            Ok(note) if took <= limit => (true, note),
            Ok(note) => (false, format!("{note}; too slow (limit {limit:?})")),
            Err(e) => (false, e),
        };
        println!("{} {id} {name} [{:.2}s] {note}", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
        if !ok {
            failed.push(id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
