//! Registry of example W-data with expected invariants.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{family_elliptic, family_parabolic, Domain, Expr, WData, WeierstrassError};

const MANIFEST: &str = include_str!("catalog.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    entry: Vec<ManifestEntry>,
}

/// One registry record as listed in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    pub summary: String,
    pub family: String,
    pub domain: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default)]
    pub total_curvature: Option<String>,
    #[serde(default)]
    pub total_curvature_infinite: bool,
    pub complete: bool,
    pub spacelike: bool,
    pub periods_vanish: bool,
    #[serde(default)]
    pub exceptional_values: Option<String>,
}

/// Properties asserted for an example, evaluated at its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub total_curvature: Option<f64>,
    pub total_curvature_infinite: bool,
    pub complete: bool,
    pub spacelike: bool,
    pub periods_vanish: bool,
    pub exceptional_values: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub summary: String,
    pub family: String,
    pub params: BTreeMap<String, String>,
    pub wdata: WData,
    pub expected: Expected,
}

fn manifest() -> Manifest {
    toml::from_str(MANIFEST).expect("embedded catalog manifest is valid")
}

/// All registry records with their default parameters.
pub fn catalog_entries() -> Vec<ManifestEntry> {
    manifest().entry
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bad(msg: String) -> WeierstrassError {
    WeierstrassError::InvalidParameter(msg)
}

/// Splits `base(k=v,...)` into the base name and its overrides.
fn split_name(name: &str) -> Result<(String, BTreeMap<String, String>), WeierstrassError> {
    let name = name.trim();
    let Some(open) = name.find('(') else {
        return Ok((name.to_string(), BTreeMap::new()));
    };
    let inner = name[open + 1..]
        .strip_suffix(')')
        .ok_or_else(|| bad(format!("missing ')' in '{name}'")))?;
    let mut out = BTreeMap::new();
    for part in inner.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{part}'")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok((name[..open].trim().to_string(), out))
}

fn constant(params: &BTreeMap<String, String>, key: &str) -> Result<Complex64, WeierstrassError> {
    let raw = params.get(key).ok_or_else(|| bad(format!("missing parameter {key}")))?;
    let e: Expr = raw.parse()?;
    if !e.is_constant() {
        return Err(bad(format!("{key} = {raw} must be a constant")));
    }
    Ok(e.eval(c(0.0, 0.0))?)
}

fn real(params: &BTreeMap<String, String>, key: &str) -> Result<f64, WeierstrassError> {
    let v = constant(params, key)?;
    if v.im.abs() > 1e-14 * v.re.abs().max(1.0) {
        return Err(bad(format!("{key} must be real")));
    }
    Ok(v.re)
}

fn integer(params: &BTreeMap<String, String>, key: &str, min: i32, max: i32) -> Result<i32, WeierstrassError> {
    let v = real(params, key)?;
    if v.fract() != 0.0 || v < min as f64 || v > max as f64 {
        return Err(bad(format!("{key} must be an integer in [{min}, {max}]")));
    }
    Ok(v as i32)
}

fn expr(params: &BTreeMap<String, String>, key: &str) -> Result<Expr, WeierstrassError> {
    let raw = params.get(key).ok_or_else(|| bad(format!("missing parameter {key}")))?;
    Ok(raw.parse()?)
}

fn zpow(n: i32) -> Expr {
    Expr::pow(Expr::z(), n)
}

fn k(v: Complex64) -> Expr {
    Expr::constant(v)
}

fn sub(a: Expr, b: Expr) -> Expr {
    Expr::sub(a, b)
}

/// The `k`-th roots of `a`.
fn roots_of(a: Complex64, k: i32) -> Vec<Complex64> {
    let r = a.norm().powf(1.0 / k as f64);
    let th = a.arg() / k as f64;
    (0..k).map(|j| Complex64::from_polar(r, th + TAU * j as f64 / k as f64)).collect()
}

fn build(base: &str, p: &BTreeMap<String, String>) -> Result<WData, WeierstrassError> {
    let zero = c(0.0, 0.0);
    let w = match base {
        "elliptic-graph" => {
            let n = integer(p, "n", 2, 64)?;
            let rot = Complex64::from_polar(1.0, -PI / 3.0);
            WData {
                name: None,
                psi1: Expr::mul(k(rot), zpow(n)),
                psi2: Expr::mul(k(rot), zpow(-n)),
                f: k(rot.conj()),
                domain: Domain::punctured_plane(vec![zero]),
            }
        }
        "elliptic-graph-family" => {
            let n = integer(p, "n", 2, 64)?;
            let alpha = real(p, "alpha")?;
            family_elliptic(zpow(n), Expr::one(), alpha, Domain::punctured_plane(vec![zero]))?
        }
        "elliptic-rational" => {
            let n = integer(p, "n", 2, 16)?;
            let m = integer(p, "m", 2, 16)?;
            let a = constant(p, "a")?;
            let alpha = real(p, "alpha")?;
            if a == zero {
                return Err(bad("a must be nonzero".into()));
            }
            let h = Expr::div(Expr::pow(sub(zpow(n + 1), k(a)), m), zpow(n));
            let mut punctures = vec![zero];
            punctures.extend(roots_of(a, n + 1));
            family_elliptic(h, Expr::one(), alpha, Domain::punctured_plane(punctures))?
        }
        "parabolic-graph" => {
            let h = expr(p, "h")?;
            let cc = constant(p, "c")?;
            if cc.im >= 0.0 {
                return Err(bad("c must satisfy Im c < 0".into()));
            }
            let half_inv = k((cc * 2.0).inv());
            let ih = Expr::mul(k(c(0.0, 1.0) / cc), h);
            WData {
                name: None,
                psi1: Expr::add(half_inv.clone(), ih.clone()),
                psi2: Expr::sub(half_inv, ih),
                f: k(cc * 0.5),
                domain: Domain::plane(),
            }
        }
        "parabolic-polynomial" => {
            let psi = expr(p, "p")?;
            let lambda = constant(p, "lambda")?;
            family_parabolic(psi, k(lambda), Domain::plane())?
        }
        "parabolic-exp" => {
            family_parabolic(Expr::exp(Expr::z()), Expr::exp(Expr::neg(Expr::z())), Domain::plane())?
        }
        "cover-stationary" => {
            let m = integer(p, "m", 2, 5)?;
            let one = Expr::one();
            let den = Expr::mul(
                Expr::pow(sub(zpow(m - 1), one.clone()), 2),
                Expr::pow(sub(Expr::z(), one), 5 - m),
            );
            let mut punctures = vec![zero];
            punctures.extend(roots_of(c(1.0, 0.0), m - 1));
            WData {
                name: None,
                psi1: Expr::z(),
                psi2: zpow(-m),
                f: Expr::div(zpow(m), den),
                domain: Domain::punctured_plane(punctures),
            }
        }
        "cover-minimal" => {
            let m = integer(p, "m", 1, 16)?;
            let mut cs = Vec::new();
            for key in ["c1", "c2", "c3", "c4"] {
                if p.contains_key(key) {
                    cs.push(constant(p, key)?);
                }
            }
            let kk = cs.len() as i32;
            if kk < 1 || kk > m + 3 {
                return Err(bad(format!("need 1 <= k <= m + 3 points, got {kk}")));
            }
            let mut den = Expr::pow(sub(Expr::z(), k(cs[0])), m + 4 - kk);
            for &cj in &cs[1..] {
                den = Expr::mul(den, sub(Expr::z(), k(cj)));
            }
            let mut punctures = vec![zero];
            for &cj in &cs {
                if cj == zero || punctures.contains(&cj) {
                    return Err(bad("c_i must be distinct and nonzero".into()));
                }
                punctures.push(cj);
            }
            WData {
                name: None,
                psi1: Expr::z(),
                psi2: zpow(-m),
                f: Expr::div(zpow(m), den),
                domain: Domain::punctured_plane(punctures),
            }
        }
        "dual-omit0" | "dual-omit1" | "dual-omit2" => {
            let (psi1, f) = match base {
                "dual-omit0" => (Expr::div(sub(zpow(2), Expr::one()), Expr::z()), Expr::z()),
                "dual-omit1" => (zpow(-1), Expr::z()),
                _ => (Expr::exp(Expr::neg(Expr::z())), Expr::exp(Expr::z())),
            };
            WData { name: None, psi1, psi2: Expr::zero(), f, domain: Domain::plane() }
        }
        _ => return Err(WeierstrassError::UnknownExample(base.to_string())),
    };
    Ok(w)
}

fn substitute(template: &str, params: &BTreeMap<String, String>) -> String {
    params.iter().fold(template.to_string(), |s, (k, v)| s.replace(&format!("{{{k}}}"), &format!("({v})")))
}

fn eval_template(template: &str, params: &BTreeMap<String, String>) -> Result<f64, WeierstrassError> {
    let e: Expr = substitute(template, params).parse()?;
    Ok(e.eval(c(0.0, 0.0))?.re)
}

/// Looks up an example by name, e.g. `"elliptic-graph(n=3)"`.
pub fn catalog(name: &str) -> Result<CatalogEntry, WeierstrassError> {
    let (base, overrides) = split_name(name)?;
    let rec = catalog_entries()
        .into_iter()
        .find(|e| e.name == base)
        .ok_or_else(|| WeierstrassError::UnknownExample(name.to_string()))?;
    let optional: &[&str] = if base == "cover-minimal" { &["c2", "c3", "c4"] } else { &[] };
    for key in overrides.keys() {
        if !rec.params.contains_key(key) && !optional.contains(&key.as_str()) {
            return Err(bad(format!("{base} has no parameter {key}")));
        }
    }
    let mut params = rec.params.clone();
    params.extend(overrides);
    let mut wdata = build(&base, &params)?;
    let label = params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
    let full = if label.is_empty() { base.clone() } else { format!("{base}({label})") };
    wdata.name = Some(full.clone());
    let mut infinite = rec.total_curvature_infinite;
    if base == "parabolic-graph" || base == "parabolic-polynomial" {
        // Constant h or psi gives a flat plane.
        let key = if base == "parabolic-graph" { "h" } else { "p" };
        infinite &= !expr(&params, key)?.is_constant();
    }
    let total_curvature = match &rec.total_curvature {
        Some(t) => Some(eval_template(t, &params)?),
        None if !infinite && rec.total_curvature_infinite => Some(0.0),
        None => None,
    };
    let exceptional_values = match &rec.exceptional_values {
        Some(t) => Some(eval_template(t, &params)?.round() as usize),
        None => None,
    };
    Ok(CatalogEntry {
        name: full,
        summary: rec.summary,
        family: rec.family,
        params,
        wdata,
        expected: Expected {
            total_curvature,
            total_curvature_infinite: infinite,
            complete: rec.complete,
            spacelike: rec.spacelike,
            periods_vanish: rec.periods_vanish,
            exceptional_values,
        },
    })
}

/// Residues of `e` at `points`, read off its Laurent expansions.
pub fn residues(e: &Expr, points: &[Complex64]) -> Result<Vec<Complex64>, WeierstrassError> {
    points.iter().map(|&p| Ok(e.series(p)?.coefficient(-1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weierstrass::phi_from_wdata;

    #[test]
    fn manifest_parses_and_builds() {
        for rec in catalog_entries() {
            let entry = catalog(&rec.name).unwrap_or_else(|e| panic!("{}: {e}", rec.name));
            assert!(entry.wdata.domain.validate().is_ok(), "{}", rec.name);
        }
    }

    #[test]
    fn unknown_names() {
        assert!(matches!(catalog("no-such-surface"), Err(WeierstrassError::UnknownExample(_))));
        assert!(matches!(catalog("elliptic-graph(q=1)"), Err(WeierstrassError::InvalidParameter(_))));
        assert!(matches!(catalog("elliptic-graph(n=1)"), Err(WeierstrassError::InvalidParameter(_))));
    }

    #[test]
    fn elliptic_graph_phi() {
        let e = catalog("elliptic-graph(n=2)").unwrap();
        let phi = phi_from_wdata(&e.wdata, c(1.0, 0.0)).unwrap();
        let expected = [c(2.0, 0.0), c(0.0, 0.0), c(0.0, 3f64.sqrt()), c(1.0, 0.0)];
        for j in 0..4 {
            assert!((phi.0[j] - expected[j]).norm() < 1e-14, "{j}: {}", phi.0[j]);
        }
        assert!((e.expected.total_curvature.unwrap() + 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rational_h_residues_vanish() {
        let e = catalog("elliptic-rational(n=2,m=2,a=1)").unwrap();
        let h = &e.wdata.psi1;
        let poles_h = [c(0.0, 0.0)];
        let poles_inv: Vec<Complex64> = e.wdata.domain.punctures[1..].to_vec();
        for r in residues(h, &poles_h).unwrap() {
            assert!(r.norm() < 1e-10);
        }
        let inv = Expr::div(Expr::one(), h.clone());
        for r in residues(&inv, &poles_inv).unwrap() {
            assert!(r.norm() < 1e-8, "{r}");
        }
        assert_eq!(e.expected.total_curvature.map(|t| (t / (-4.0 * PI)).round()), Some(6.0));
    }

    #[test]
    fn family_matches_verbatim_graph() {
        for n in [2, 3, 5] {
            let fam = catalog(&format!("elliptic-graph-family(n={n})")).unwrap();
            let verb = catalog(&format!("elliptic-graph(n={n})")).unwrap();
            let rot = Complex64::from_polar(1.0, PI / (3.0 * n as f64));
            for z in [c(0.7, 0.4), c(-1.3, 0.2), c(0.1, -2.0)] {
                let a = phi_from_wdata(&fam.wdata, z).unwrap();
                let b = phi_from_wdata(&verb.wdata, rot * z).unwrap();
                let sign = [1.0; 4];
                for j in 0..4 {
                    assert!((a.0[j] - sign[j] * b.0[j]).norm() < 1e-12 * (1.0 + b.0[j].norm()), "n = {n}, {j}: {} vs {}", a.0[j], b.0[j]);
                }
            }
        }
    }

    #[test]
    fn elliptic_graph_curvature_scales_with_n() {
        for n in [3, 4] {
            let e = catalog(&format!("elliptic-graph(n={n})")).unwrap();
            let tk = crate::weierstrass::total_curvature(&e.wdata, &crate::hyperplanes::Exhaustion::default()).unwrap();
            let v = tk.value().unwrap();
            assert!((v + 4.0 * PI * n as f64).abs() < 1e-2 * 4.0 * PI * n as f64, "n = {n}: {v}");
        }
    }
}
