use crate::algebra::{DGAlgebra, GradedBasis};
use crate::error::{Error, Result};
use crate::linalg::SparseVec;

pub const PRESET_NAMES: &[&str] = &["point", "sphere:N", "cpn:N", "product(A,B)"];

/// Preset models: `point`, `sphere:n` (`ℚ[v]/v²`, `|v| = n ≥ 2`),
/// `cpn:n` (`ℚ[h]/h^{n+1}`, `|h| = 2`) and `product(a,b)`.
pub fn preset(spec: &str) -> Result<DGAlgebra> {
    let spec = spec.trim();
    if spec == "point" {
        return Ok(DGAlgebra::ground("point"));
    }
    if let Some(inner) = spec.strip_prefix("product(").and_then(|s| s.strip_suffix(')')) {
        let (a, b) = split_top_level(inner).ok_or_else(|| Error::UnknownPreset(spec.to_string()))?;
        let (a, b) = (preset(a)?, preset(b)?);
        let name = format!("{}_{}", a.name(), b.name());
        return DGAlgebra::tensor(&a, &b, name);
    }
    let (kind, arg) = spec.split_once(':').ok_or_else(|| Error::UnknownPreset(spec.to_string()))?;
    let n: i32 = arg.trim().parse().map_err(|_| Error::UnknownPreset(spec.to_string()))?;
    match kind.trim() {
        "sphere" => sphere(n),
        "cpn" => cpn(n),
        _ => Err(Error::UnknownPreset(spec.to_string())),
    }
}

fn split_top_level(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return Some((&s[..i], &s[i + 1..])),
            _ => {}
        }
    }
    None
}

fn sphere(n: i32) -> Result<DGAlgebra> {
    if n == 1 {
        return Err(Error::NotSimplyConnected("sphere:1 has a degree 1 class".into()));
    }
    if n < 1 {
        return Err(Error::UnknownPreset(format!("sphere:{n}")));
    }
    let basis = GradedBasis::new(vec![("1".into(), 0), ("v".into(), n)])?;
    let mult = vec![vec![SparseVec::unit(0), SparseVec::unit(1)], vec![SparseVec::unit(1), SparseVec::new()]];
    DGAlgebra::new(format!("s{n}"), basis, 0, mult, vec![SparseVec::new(); 2])
}

fn cpn(n: i32) -> Result<DGAlgebra> {
    if n < 1 {
        return Err(Error::UnknownPreset(format!("cpn:{n}")));
    }
    let n = n as usize;
    let name = |i: usize| match i {
        0 => "1".to_string(),
        1 => "h".to_string(),
        _ => format!("h{i}"),
    };
    let basis = GradedBasis::new((0..=n).map(|i| (name(i), 2 * i as i32)).collect())?;
    let mult = (0..=n)
        .map(|i| (0..=n).map(|j| if i + j <= n { SparseVec::unit(i + j) } else { SparseVec::new() }).collect())
        .collect();
    DGAlgebra::new(format!("cp{n}"), basis, 0, mult, vec![SparseVec::new(); n + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Carrier;

    #[test]
    fn presets_validate() {
        for s in ["point", "sphere:2", "sphere:3", "sphere:8", "cpn:1", "cpn:4", "product(sphere:2,sphere:3)", "product(cpn:2,product(sphere:3,sphere:4))"] {
            let a = preset(s).unwrap();
            assert!(a.validate().is_valid(), "{s}");
        }
    }

    #[test]
    fn degrees() {
        assert_eq!(preset("sphere:3").unwrap().basis().degrees(), &[0, 3]);
        assert_eq!(preset("point").unwrap().dim(), 1);
        let p = preset("product(sphere:2, sphere:3)").unwrap();
        let mut d = p.basis().degrees().to_vec();
        d.sort();
        assert_eq!(d, vec![0, 2, 3, 5]);
    }

    #[test]
    fn rejected() {
        assert!(matches!(preset("sphere:1"), Err(Error::NotSimplyConnected(_))));
        assert!(matches!(preset("torus"), Err(Error::UnknownPreset(_))));
        assert!(matches!(preset("cpn:x"), Err(Error::UnknownPreset(_))));
    }
}
