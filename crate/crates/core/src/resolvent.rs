//! Benchmark resolvents `res(m, n) = res_x(sum a_i x^i, sum b_i x^i)`.
//!
//! The resultant is the determinant of the Sylvester matrix, expanded by
//! minors along rows from the bottom up with every minor memoized on its
//! column subset (Gentleman–Johnson). Intermediate polynomials use monomials
//! packed eight bits per variable into a `u128`.

use std::fs;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::error::Error;
use crate::expr::{Monomial, Polynomial, VarId, VarTable};

/// Default cap on `m + n` for [`gen_res`].
pub const RESOLVENT_CAP: u32 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResolventSpec {
    m: u32,
    n: u32,
}

impl ResolventSpec {
    /// Degrees are swapped if needed so that `m >= n`.
    pub fn new(m: u32, n: u32) -> Result<Self, Error> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidConfig(format!("resolvent degrees must be positive, got ({m}, {n})")));
        }
        Ok(ResolventSpec {
            m: m.max(n),
            n: m.min(n),
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn file_name(&self) -> String {
        format!("res_{}_{}.txt", self.m, self.n)
    }

    fn a(&self, i: u32) -> VarId {
        VarId(i)
    }

    fn b(&self, i: u32) -> VarId {
        VarId(self.m + 1 + i)
    }
}

/// Square matrix whose entries are polynomials over a shared table.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicMatrix {
    pub vars: VarTable,
    pub size: usize,
    /// Row-major.
    pub entries: Vec<Polynomial>,
}

impl SymbolicMatrix {
    pub fn entry(&self, row: usize, col: usize) -> &Polynomial {
        &self.entries[row * self.size + col]
    }

    /// Rows of entries rendered as text, for inspection and tests.
    pub fn rows_text(&self) -> Vec<Vec<String>> {
        (0..self.size)
            .map(|r| (0..self.size).map(|c| self.entry(r, c).to_string()).collect())
            .collect()
    }
}

/// Sylvester matrix: `n` shifted rows of `a_m..a_0`, then `m` shifted rows of
/// `b_n..b_0`, over variables `a0..am, b0..bn`.
pub fn sylvester_matrix(spec: ResolventSpec) -> SymbolicMatrix {
    let (m, n) = (spec.m as usize, spec.n as usize);
    let names = (0..=m)
        .map(|i| format!("a{i}"))
        .chain((0..=n).map(|i| format!("b{i}")));
    let vars = VarTable::from_names(names).expect("distinct identifiers");
    let size = m + n;
    let zero = Polynomial::zero(vars.clone());
    let mut entries = vec![zero; size * size];
    let sym = |v: VarId| Polynomial::variable(vars.clone(), v).expect("known variable");
    for r in 0..n {
        for k in 0..=m {
            entries[r * size + r + k] = sym(spec.a((m - k) as u32));
        }
    }
    for r in 0..m {
        for k in 0..=n {
            entries[(n + r) * size + r + k] = sym(spec.b((n - k) as u32));
        }
    }
    SymbolicMatrix { vars, size, entries }
}

type Packed = u128;
type PackedPoly = FxHashMap<Packed, BigInt>;

const BITS: usize = 8;
const MAX_PACKED_VARS: usize = 128 / BITS;

fn pack(mono: &Monomial) -> Packed {
    mono.factors()
        .iter()
        .fold(0, |acc, &(v, e)| acc | (Packed::from(e) << (BITS * v.index())))
}

fn unpack(key: Packed, nvars: usize) -> Monomial {
    Monomial::from_pairs((0..nvars).map(|v| (VarId(v as u32), ((key >> (BITS * v)) & 0xff) as u32)))
}

/// Exact determinant by memoized minor expansion.
///
/// Limited to 16 variables with per-variable degree below 256 in the result.
pub fn symbolic_determinant(matrix: &SymbolicMatrix) -> Result<Polynomial, Error> {
    let size = matrix.size;
    let nvars = matrix.vars.len();
    if nvars > MAX_PACKED_VARS {
        return Err(Error::InvalidConfig(format!(
            "symbolic determinant supports at most {MAX_PACKED_VARS} variables, got {nvars}"
        )));
    }
    if size > 64 {
        return Err(Error::InvalidConfig("matrix too large for column-subset memoization".into()));
    }
    // Each variable's degree is at most the sum over rows of its largest
    // degree in that row.
    let mut bound = vec![0u32; nvars];
    for r in 0..size {
        let mut row_max = vec![0u32; nvars];
        for c in 0..size {
            for t in matrix.entry(r, c).terms() {
                for &(v, e) in t.mono.factors() {
                    row_max[v.index()] = row_max[v.index()].max(e);
                }
            }
        }
        bound.iter_mut().zip(row_max).for_each(|(b, m)| *b += m);
    }
    if bound.iter().any(|&b| b >= 1 << BITS) {
        return Err(Error::InvalidConfig("variable degree too large for packed monomials".into()));
    }

    let packed: Vec<Vec<(Packed, BigInt)>> = matrix
        .entries
        .iter()
        .map(|p| p.terms().iter().map(|t| (pack(&t.mono), t.coeff.clone())).collect())
        .collect();

    // Minors of the bottom k rows, keyed by column subset.
    let mut level: FxHashMap<u64, PackedPoly> = FxHashMap::default();
    level.insert(0, std::iter::once((0, BigInt::one())).collect());
    for k in 1..=size {
        let row = size - k;
        let mut next: FxHashMap<u64, PackedPoly> = FxHashMap::default();
        for (&cols, minor) in &level {
            for col in 0..size {
                let bit = 1u64 << col;
                let entry = &packed[row * size + col];
                if cols & bit != 0 || entry.is_empty() {
                    continue;
                }
                // Position of `col` within the enlarged subset.
                let negative = (cols & (bit - 1)).count_ones() % 2 == 1;
                let target = next.entry(cols | bit).or_default();
                for (em, ec) in entry {
                    for (mm, mc) in minor {
                        let prod = ec * mc;
                        let slot = target.entry(em + mm).or_insert_with(BigInt::zero);
                        if negative {
                            *slot -= prod;
                        } else {
                            *slot += prod;
                        }
                    }
                }
            }
        }
        next.retain(|_, p| {
            p.retain(|_, c| !c.is_zero());
            !p.is_empty()
        });
        level = next;
    }

    let full = if size == 64 { u64::MAX } else { (1u64 << size) - 1 };
    let det = level.remove(&full).unwrap_or_default();
    let acc = det.into_iter().map(|(k, c)| (unpack(k, nvars), c)).collect();
    Ok(Polynomial::from_collected(matrix.vars.clone(), acc))
}

pub fn gen_res_capped(spec: ResolventSpec, cap: u32) -> Result<Polynomial, Error> {
    let sum = spec.m + spec.n;
    if sum > cap {
        return Err(Error::ResolventCapExceeded { sum, cap });
    }
    Ok(symbolic_determinant(&sylvester_matrix(spec))?.with_sorted_variables())
}

/// `res(m, n)` over `m + n + 2` variables.
pub fn gen_res(spec: ResolventSpec) -> Result<Polynomial, Error> {
    gen_res_capped(spec, RESOLVENT_CAP)
}

pub fn cache_path(dir: &Path, spec: ResolventSpec) -> PathBuf {
    dir.join(spec.file_name())
}

/// Reads `res_<m>_<n>.txt` from `dir`, generating and writing it first if it
/// does not exist.
pub fn load_or_generate(dir: &Path, spec: ResolventSpec) -> Result<Polynomial, Error> {
    let path = cache_path(dir, spec);
    if path.exists() {
        let text = fs::read_to_string(&path)?;
        return Ok(Polynomial::parse(&text)?);
    }
    let p = gen_res(spec)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("txt.tmp");
    fs::write(&tmp, format!("{p}\n"))?;
    fs::rename(&tmp, &path)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_normalizes() {
        let s = ResolventSpec::new(2, 5).unwrap();
        assert_eq!((s.m(), s.n()), (5, 2));
        assert!(ResolventSpec::new(0, 3).is_err());
        assert_eq!(s.file_name(), "res_5_2.txt");
    }

    #[test]
    fn small_sylvester_matrices() {
        let m11 = sylvester_matrix(ResolventSpec::new(1, 1).unwrap());
        assert_eq!(m11.rows_text(), vec![vec!["a1", "a0"], vec!["b1", "b0"]]);
        let m21 = sylvester_matrix(ResolventSpec::new(2, 1).unwrap());
        assert_eq!(
            m21.rows_text(),
            vec![vec!["a2", "a1", "a0"], vec!["b1", "b0", "0"], vec!["0", "b1", "b0"]]
        );
        let m74 = sylvester_matrix(ResolventSpec::new(7, 4).unwrap());
        assert_eq!(m74.size, 11);
        assert_eq!(m74.vars.len(), 13);
    }

    #[test]
    fn small_determinants() {
        let d = symbolic_determinant(&sylvester_matrix(ResolventSpec::new(1, 1).unwrap())).unwrap();
        assert_eq!(d.to_string(), "-a0*b1 + a1*b0");
        let d = gen_res(ResolventSpec::new(2, 1).unwrap()).unwrap();
        assert_eq!(d, Polynomial::parse("a2*b0^2 - a1*b0*b1 + a0*b1^2").unwrap());
    }

    #[test]
    fn diagonal_determinant() {
        let vars = VarTable::from_names(["p", "q", "r"]).unwrap();
        let zero = Polynomial::zero(vars.clone());
        let mut entries = vec![zero; 9];
        for i in 0..3 {
            entries[i * 3 + i] = Polynomial::variable(vars.clone(), VarId(i as u32)).unwrap();
        }
        let m = SymbolicMatrix { vars, size: 3, entries };
        assert_eq!(symbolic_determinant(&m).unwrap().to_string(), "p*q*r");
    }

    #[test]
    fn general_entries() {
        // det [[x+1, y], [2, x]] = x^2 + x - 2y
        let vars = VarTable::from_names(["x", "y"]).unwrap();
        let e = |s: &str| {
            let p = Polynomial::parse(s).unwrap();
            let terms = p
                .terms()
                .iter()
                .map(|t| {
                    let mono = Monomial::from_pairs(
                        t.mono.factors().iter().map(|&(v, e)| (vars.lookup(p.vars().name(v)).unwrap(), e)),
                    );
                    (t.coeff.clone(), mono)
                })
                .collect::<Vec<_>>();
            Polynomial::from_terms(vars.clone(), terms).unwrap()
        };
        let m = SymbolicMatrix {
            vars: vars.clone(),
            size: 2,
            entries: vec![e("x + 1"), e("y"), e("2"), e("x")],
        };
        assert_eq!(symbolic_determinant(&m).unwrap().to_string(), "x^2 + x - 2*y");
    }

    #[test]
    fn variable_counts_and_homogeneity() {
        for (m, n) in [(3, 2), (4, 4), (5, 3)] {
            let p = gen_res(ResolventSpec::new(m, n).unwrap()).unwrap();
            assert_eq!(p.num_vars() as u32, m + n + 2);
            for t in p.terms() {
                let (mut da, mut db) = (0, 0);
                for &(v, e) in t.mono.factors() {
                    if p.vars().name(v).starts_with('a') {
                        da += e;
                    } else {
                        db += e;
                    }
                }
                assert_eq!((da, db), (n, m));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            gen_res(ResolventSpec::new(7, 7).unwrap()),
            Err(Error::ResolventCapExceeded { sum: 14, cap: 13 })
        ));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let spec = ResolventSpec::new(3, 2).unwrap();
        let a = load_or_generate(dir.path(), spec).unwrap();
        assert!(cache_path(dir.path(), spec).exists());
        let b = load_or_generate(dir.path(), spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sorted_names_for_two_digit_indices() {
        let p = gen_res_capped(ResolventSpec::new(10, 1).unwrap(), 13).unwrap();
        assert_eq!(p.vars().names()[2], "a10");
        assert_eq!(Polynomial::parse(&p.to_string()).unwrap(), p);
    }
}
