//! The invariant suite behind `verify`.

use crate::algebra::DGAlgebra;
use crate::error::Result;
use crate::linalg;
use crate::loops::hochschild;
use crate::oracle::{hochschild_dims_bruteforce, twisting_cochain_check};
use crate::transfer::{build_contraction, chen_connection, eth_squared, mc_residual, PivotOrder};
use crate::twisted::{
    basis_enumeration, cohomology, differential_matrix, poincare_check, Coefficients, ComplexSpec, PoincareMap,
};

/// Word length used for the MC, ð² and twisting cochain checks.
pub const PROBE_LEN: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub oracle: bool,
    /// Top degree for the Poincaré check.
    pub poincare: Option<i32>,
    pub max_len: Option<usize>,
}

/// `d_ω ∘ d_ω = 0` on every degree of the window.
pub fn squares_to_zero(spec: &ComplexSpec) -> Result<bool> {
    let (lo, hi) = spec.window();
    for d in lo..hi {
        let (b0, b1, b2) = (basis_enumeration(spec, d), basis_enumeration(spec, d + 1), basis_enumeration(spec, d + 2));
        let m0 = differential_matrix(spec, &b0, &b1)?;
        let m1 = differential_matrix(spec, &b1, &b2)?;
        if m0.iter().any(|c| !linalg::apply(&m1, c).is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs every check; stops only on input errors.
pub fn verify_model(alg: &DGAlgebra, window: (i32, i32), opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let report = alg.validate();
    out.push(CheckResult::new("validate", report.is_valid(), report.summary()));
    if !report.is_valid() {
        return Ok(out);
    }
    let hd = build_contraction(alg, PivotOrder::default())?;
    let bad = hd.verify(alg);
    out.push(CheckResult::new("contraction", bad.is_empty(), bad.join("; ")));

    let probe = chen_connection(alg, &hd, opts.max_len.unwrap_or(PROBE_LEN).max(1))?;
    let res = mc_residual(alg, &probe);
    out.push(CheckResult::new("mc_residual", res.is_zero(), format!("{} nonzero terms up to length {}", res.len(), probe.max_len())));
    let sq: usize = eth_squared(&probe).iter().map(|t| t.len()).sum();
    out.push(CheckResult::new("eth_squared", sq == 0, format!("{sq} nonzero terms")));
    let tw = twisting_cochain_check(alg, &hd, &probe, probe.max_len())?;
    out.push(CheckResult::new("twisting_cochain", tw.is_zero(), format!("{} bar words with nonzero residual", tw.values.len())));

    let (spec, table) = hochschild(alg, window, false, opts.max_len)?;
    out.push(CheckResult::new("d_omega_squared", squares_to_zero(&spec)?, format!("window {}..{}", window.0, window.1)));

    let len = spec.connection().max_len();
    let longer = chen_connection(alg, &hd, len + 2)?;
    let spec2 = ComplexSpec::new(alg.clone(), Coefficients::Algebra, longer, window)?;
    let table2 = cohomology(&spec2)?;
    out.push(CheckResult::new(
        "truncation",
        table.dims() == table2.dims(),
        format!("word length {len} against {}", len + 2),
    ));

    if opts.oracle {
        for dual in [false, true] {
            let brute = hochschild_dims_bruteforce(alg, window, dual)?;
            let (_, t) = hochschild(alg, window, dual, opts.max_len)?;
            let name = if dual { "oracle_dual" } else { "oracle" };
            let mismatch: Vec<String> = brute
                .dims
                .iter()
                .zip(t.dims())
                .filter(|(a, b)| a.1 != b.1)
                .map(|(a, b)| format!("degree {}: bar {} twisted {}", a.0, a.1, b.1))
                .collect();
            out.push(CheckResult::new(name, mismatch.is_empty(), mismatch.join("; ")));
        }
    }

    if let Some(n) = opts.poincare {
        let map = PoincareMap::from_fundamental_class(alg, &hd, n)?;
        let target_window = (window.0 - n, window.1 - n);
        let (dspec, dtable) = hochschild(alg, target_window, true, opts.max_len)?;
        let rows = poincare_check(&spec, &table, &dspec, &dtable, &map)?;
        let chain = rows.iter().all(|r| r.chain_map_ok);
        let iso: Vec<String> = rows.iter().filter(|r| !r.is_iso()).map(|r| format!("degree {}", r.degree)).collect();
        out.push(CheckResult::new("poincare_chain_map", chain, ""));
        out.push(CheckResult::new("poincare_rank", iso.is_empty(), iso.join(", ")));
    }
    Ok(out)
}
