//! Bourbaki root data for the irreducible Coxeter types of rank <= 8:
//! simple roots in standard (Planche) coordinates, fundamental weights,
//! Cartan matrices, and the root/weight coefficient matrices.
//!
//! All coordinates here are exact rationals. The fundamental weights are
//! not transcribed from tables; they are computed from the simple roots
//! as the dual basis of the coroots inside the span of the roots, which
//! pins them uniquely and reproduces the Planche values.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{rat_dot, LinalgError, RatMat};
use crate::places::Rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootSysError {
    #[error("unknown root system label {0:?}")]
    UnknownLabel(String),
    #[error("degenerate root basis")]
    Degenerate(#[from] LinalgError),
}

/// Irreducible type symbol plus rank, e.g. `D4`, `A2`, `G2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TypeLabel {
    A(u8),
    B(u8),
    C(u8),
    D(u8),
    E(u8),
    F4,
    G2,
}

impl TypeLabel {
    pub fn rank(self) -> usize {
        match self {
            TypeLabel::A(n) | TypeLabel::B(n) | TypeLabel::C(n) | TypeLabel::D(n)
            | TypeLabel::E(n) => n as usize,
            TypeLabel::F4 => 4,
            TypeLabel::G2 => 2,
        }
    }

    fn valid(self) -> bool {
        match self {
            TypeLabel::A(n) => (1..=8).contains(&n),
            TypeLabel::B(n) | TypeLabel::C(n) => (2..=8).contains(&n),
            TypeLabel::D(n) => (4..=8).contains(&n),
            TypeLabel::E(n) => (6..=8).contains(&n),
            TypeLabel::F4 | TypeLabel::G2 => true,
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::A(n) => write!(f, "A{n}"),
            TypeLabel::B(n) => write!(f, "B{n}"),
            TypeLabel::C(n) => write!(f, "C{n}"),
            TypeLabel::D(n) => write!(f, "D{n}"),
            TypeLabel::E(n) => write!(f, "E{n}"),
            TypeLabel::F4 => write!(f, "F4"),
            TypeLabel::G2 => write!(f, "G2"),
        }
    }
}

impl FromStr for TypeLabel {
    type Err = RootSysError;

    fn from_str(s: &str) -> Result<Self, RootSysError> {
        let bad = || RootSysError::UnknownLabel(s.to_string());
        let mut chars = s.trim().chars();
        let family = chars.next().ok_or_else(bad)?;
        let rank: u8 = chars.as_str().parse().map_err(|_| bad())?;
        let label = match family.to_ascii_uppercase() {
            'A' => TypeLabel::A(rank),
            'B' => TypeLabel::B(rank),
            'C' => TypeLabel::C(rank),
            'D' => TypeLabel::D(rank),
            'E' => TypeLabel::E(rank),
            'F' if rank == 4 => TypeLabel::F4,
            'G' if rank == 2 => TypeLabel::G2,
            _ => return Err(bad()),
        };
        if label.valid() {
            Ok(label)
        } else {
            Err(bad())
        }
    }
}

/// Root data in standard coordinates. `simple_roots` and `fund_weights`
/// hold the alpha_i and omega_i as columns; the inner product is the
/// Euclidean dot product on the ambient space.
#[derive(Clone, Debug)]
pub struct RootSystemData {
    pub label: TypeLabel,
    pub rank: usize,
    pub ambient_dim: usize,
    pub simple_roots: RatMat,
    pub fund_weights: RatMat,
    pub cartan: RatMat,
}

/// Coefficient matrices between the root basis and the weight basis:
/// `alpha_i = sum_j c[i][j] omega_j` and `omega_j = sum_i n[j][i] alpha_i`.
/// The two are mutually inverse; n has positive diagonal and nonnegative
/// entries for every irreducible type.
#[derive(Clone, Debug)]
pub struct CoeffMatrices {
    pub c: RatMat,
    pub n: RatMat,
}

fn ri(n: i64) -> Rational {
    Rational::from_int(n)
}

fn rq(n: i64, d: i64) -> Rational {
    Rational::new(n, d).expect("nonzero denominator")
}

/// Simple roots as columns, Bourbaki Planche coordinates.
fn simple_root_columns(label: TypeLabel) -> (usize, Vec<Vec<Rational>>) {
    let chain = |amb: usize, upto: usize| -> Vec<Vec<Rational>> {
        (0..upto)
            .map(|i| {
                let mut v = vec![Rational::zero(); amb];
                v[i] = ri(1);
                v[i + 1] = ri(-1);
                v
            })
            .collect()
    };
    match label {
        TypeLabel::A(n) => {
            let n = n as usize;
            (n + 1, chain(n + 1, n))
        }
        TypeLabel::B(n) => {
            let n = n as usize;
            let mut cols = chain(n, n - 1);
            let mut last = vec![Rational::zero(); n];
            last[n - 1] = ri(1);
            cols.push(last);
            (n, cols)
        }
        TypeLabel::C(n) => {
            let n = n as usize;
            let mut cols = chain(n, n - 1);
            let mut last = vec![Rational::zero(); n];
            last[n - 1] = ri(2);
            cols.push(last);
            (n, cols)
        }
        TypeLabel::D(n) => {
            let n = n as usize;
            let mut cols = chain(n, n - 1);
            let mut last = vec![Rational::zero(); n];
            last[n - 2] = ri(1);
            last[n - 1] = ri(1);
            cols.push(last);
            (n, cols)
        }
        TypeLabel::E(n) => {
            let n = n as usize;
            let mut a1 = vec![rq(-1, 2); 8];
            a1[0] = rq(1, 2);
            a1[7] = rq(1, 2);
            let mut a2 = vec![Rational::zero(); 8];
            a2[0] = ri(1);
            a2[1] = ri(1);
            let mut cols = vec![a1, a2];
            for i in 0..(n - 2) {
                let mut v = vec![Rational::zero(); 8];
                v[i] = ri(-1);
                v[i + 1] = ri(1);
                cols.push(v);
            }
            (8, cols)
        }
        TypeLabel::F4 => (
            4,
            vec![
                vec![ri(0), ri(1), ri(-1), ri(0)],
                vec![ri(0), ri(0), ri(1), ri(-1)],
                vec![ri(0), ri(0), ri(0), ri(1)],
                vec![rq(1, 2), rq(-1, 2), rq(-1, 2), rq(-1, 2)],
            ],
        ),
        TypeLabel::G2 => (
            3,
            vec![
                vec![ri(1), ri(-1), ri(0)],
                vec![ri(-2), ri(1), ri(1)],
            ],
        ),
    }
}

fn columns_to_mat(amb: usize, cols: &[Vec<Rational>]) -> RatMat {
    let mut m = RatMat::zeros(amb, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m.set(i, j, v.clone());
        }
    }
    m
}

/// Cartan matrix entries `C[i][j] = 2 <a_i, a_j> / <a_j, a_j>`.
fn cartan_from_roots(cols: &[Vec<Rational>]) -> RatMat {
    let r = cols.len();
    let mut c = RatMat::zeros(r, r);
    for j in 0..r {
        let nj = rat_dot(&cols[j], &cols[j]);
        let inv = nj.recip().expect("root has nonzero length");
        for i in 0..r {
            let num = &(&rat_dot(&cols[i], &cols[j]) * &ri(2)) * &inv;
            c.set(i, j, num);
        }
    }
    c
}

/// Build the root data for an irreducible type of rank <= 8.
pub fn build_root_system(label: TypeLabel) -> Result<RootSystemData, RootSysError> {
    if !label.valid() {
        return Err(RootSysError::UnknownLabel(label.to_string()));
    }
    let (amb, root_cols) = simple_root_columns(label);
    let rank = root_cols.len();
    let cartan = cartan_from_roots(&root_cols);
    // omega_j = sum_i (C^{-1})[j][i] alpha_i -- the dual basis of the
    // coroots inside the span of the roots
    let n = cartan.inverse()?;
    let mut weight_cols = Vec::with_capacity(rank);
    for j in 0..rank {
        let mut w = vec![Rational::zero(); amb];
        for i in 0..rank {
            let coeff = n.get(j, i);
            for (row, entry) in w.iter_mut().enumerate() {
                *entry = &*entry + &(coeff * &root_cols[i][row]);
            }
        }
        weight_cols.push(w);
    }
    let data = RootSystemData {
        label,
        rank,
        ambient_dim: amb,
        simple_roots: columns_to_mat(amb, &root_cols),
        fund_weights: columns_to_mat(amb, &weight_cols),
        cartan,
    };
    debug_assert!(duality_holds(&data));
    Ok(data)
}

/// <omega_i, alpha_j^vee> = delta_ij, checked exactly.
fn duality_holds(rs: &RootSystemData) -> bool {
    for i in 0..rs.rank {
        let w = rs.fund_weights.column(i);
        for j in 0..rs.rank {
            let a = rs.simple_roots.column(j);
            let pairing = &(&rat_dot(&w, &a) * &ri(2)) * &rat_dot(&a, &a).recip().unwrap();
            let expected = if i == j { ri(1) } else { ri(0) };
            if pairing != expected {
                return false;
            }
        }
    }
    true
}

/// Fundamental weights rescaled to unit Euclidean length, as f64 columns.
pub fn normalized_weights(rs: &RootSystemData) -> Vec<Vec<f64>> {
    (0..rs.rank)
        .map(|j| {
            let col = rs.fund_weights.column(j);
            let len = rat_dot(&col, &col).to_f64().sqrt();
            col.iter().map(|v| v.to_f64() / len).collect()
        })
        .collect()
}

/// Simple roots as f64 columns.
pub fn simple_roots_f64(rs: &RootSystemData) -> Vec<Vec<f64>> {
    (0..rs.rank).map(|j| {
        rs.simple_roots
            .column(j)
            .iter()
            .map(Rational::to_f64)
            .collect()
    })
    .collect()
}

/// The coefficient matrices relating roots and weights. `c` is the
/// Cartan matrix (roots expanded in the weight basis) and `n` its exact
/// inverse (weights expanded in the root basis).
pub fn coeff_matrices(rs: &RootSystemData) -> Result<CoeffMatrices, RootSysError> {
    let c = rs.cartan.clone();
    let n = c.inverse()?;
    Ok(CoeffMatrices { c, n })
}

/// Per-pair values <alpha_i, omega_j> together with the sign verdicts:
/// zero off the diagonal, strictly positive on it.
#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub label: String,
    pub pairings: Vec<Vec<Rational>>,
    pub off_diagonal_zero: bool,
    pub diagonal_positive: bool,
}

impl OrthogonalityReport {
    pub fn ok(&self) -> bool {
        self.off_diagonal_zero && self.diagonal_positive
    }
}

pub fn orthogonality_check(rs: &RootSystemData) -> OrthogonalityReport {
    let mut pairings = Vec::with_capacity(rs.rank);
    let mut off_zero = true;
    let mut diag_pos = true;
    for i in 0..rs.rank {
        let a = rs.simple_roots.column(i);
        let mut row = Vec::with_capacity(rs.rank);
        for j in 0..rs.rank {
            let w = rs.fund_weights.column(j);
            let v = rat_dot(&a, &w);
            if i == j {
                diag_pos &= !v.is_zero() && !v.is_negative();
            } else {
                off_zero &= v.is_zero();
            }
            row.push(v);
        }
        pairings.push(row);
    }
    OrthogonalityReport {
        label: rs.label.to_string(),
        pairings,
        off_diagonal_zero: off_zero,
        diagonal_positive: diag_pos,
    }
}

/// The types the classification table covers.
pub fn classification_table_types() -> Vec<TypeLabel> {
    vec![
        TypeLabel::A(1),
        TypeLabel::A(2),
        TypeLabel::A(3),
        TypeLabel::A(4),
        TypeLabel::A(5),
        TypeLabel::B(2),
        TypeLabel::B(3),
        TypeLabel::B(4),
        TypeLabel::C(2),
        TypeLabel::C(3),
        TypeLabel::C(4),
        TypeLabel::D(4),
        TypeLabel::D(5),
        TypeLabel::E(6),
        TypeLabel::E(7),
        TypeLabel::E(8),
        TypeLabel::F4,
        TypeLabel::G2,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    /// Cartan matrix built from the Dynkin diagram alone: an independent
    /// route against the one computed from root coordinates.
    fn cartan_from_diagram(label: TypeLabel) -> RatMat {
        let rank = label.rank();
        let mut c = RatMat::identity(rank);
        for i in 0..rank {
            c.set(i, i, r(2, 1));
        }
        let mut put = |i: usize, j: usize, v: i64| c.set(i, j, r(v, 1));
        match label {
            TypeLabel::A(_) => {
                for i in 0..rank - 1 {
                    put(i, i + 1, -1);
                    put(i + 1, i, -1);
                }
            }
            TypeLabel::B(_) => {
                for i in 0..rank - 1 {
                    put(i, i + 1, -1);
                    put(i + 1, i, -1);
                }
                put(rank - 2, rank - 1, -2);
            }
            TypeLabel::C(_) => {
                for i in 0..rank - 1 {
                    put(i, i + 1, -1);
                    put(i + 1, i, -1);
                }
                put(rank - 1, rank - 2, -2);
            }
            TypeLabel::D(_) => {
                for i in 0..rank - 2 {
                    put(i, i + 1, -1);
                    put(i + 1, i, -1);
                }
                put(rank - 3, rank - 1, -1);
                put(rank - 1, rank - 3, -1);
            }
            TypeLabel::E(_) => {
                // Bourbaki numbering: chain 1-3-4-5-..., with 2 attached to 4
                let edges: &[(usize, usize)] = &[(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];
                for &(i, j) in edges {
                    if i <= rank && j <= rank {
                        put(i - 1, j - 1, -1);
                        put(j - 1, i - 1, -1);
                    }
                }
            }
            TypeLabel::F4 => {
                put(0, 1, -1);
                put(1, 0, -1);
                put(1, 2, -2);
                put(2, 1, -1);
                put(2, 3, -1);
                put(3, 2, -1);
            }
            TypeLabel::G2 => {
                put(0, 1, -1);
                put(1, 0, -3);
            }
        }
        c
    }

    fn all_types() -> Vec<TypeLabel> {
        let mut v = Vec::new();
        for n in 1..=8 {
            v.push(TypeLabel::A(n));
        }
        for n in 2..=8 {
            v.push(TypeLabel::B(n));
            v.push(TypeLabel::C(n));
        }
        for n in 4..=8 {
            v.push(TypeLabel::D(n));
        }
        for n in 6..=8 {
            v.push(TypeLabel::E(n));
        }
        v.push(TypeLabel::F4);
        v.push(TypeLabel::G2);
        v
    }

    #[test]
    fn labels_parse_and_reject() {
        assert_eq!("D4".parse::<TypeLabel>().unwrap(), TypeLabel::D(4));
        assert_eq!("g2".parse::<TypeLabel>().unwrap(), TypeLabel::G2);
        assert!("D3".parse::<TypeLabel>().is_err());
        assert!("E9".parse::<TypeLabel>().is_err());
        assert!("H4".parse::<TypeLabel>().is_err());
        assert!("A0".parse::<TypeLabel>().is_err());
    }

    #[test]
    fn cartan_matches_diagram_tables_exactly() {
        for label in all_types() {
            let rs = build_root_system(label).unwrap();
            assert_eq!(rs.cartan, cartan_from_diagram(label), "{label}");
        }
    }

    #[test]
    fn d4_matches_planche_coordinates() {
        let rs = build_root_system(TypeLabel::D(4)).unwrap();
        let roots: Vec<Vec<Rational>> = (0..4).map(|j| rs.simple_roots.column(j)).collect();
        assert_eq!(roots[0], vec![r(1, 1), r(-1, 1), r(0, 1), r(0, 1)]);
        assert_eq!(roots[1], vec![r(0, 1), r(1, 1), r(-1, 1), r(0, 1)]);
        assert_eq!(roots[2], vec![r(0, 1), r(0, 1), r(1, 1), r(-1, 1)]);
        assert_eq!(roots[3], vec![r(0, 1), r(0, 1), r(1, 1), r(1, 1)]);
        let weights: Vec<Vec<Rational>> = (0..4).map(|j| rs.fund_weights.column(j)).collect();
        assert_eq!(weights[0], vec![r(1, 1), r(0, 1), r(0, 1), r(0, 1)]);
        assert_eq!(weights[1], vec![r(1, 1), r(1, 1), r(0, 1), r(0, 1)]);
        assert_eq!(weights[2], vec![r(1, 2), r(1, 2), r(1, 2), r(-1, 2)]);
        assert_eq!(weights[3], vec![r(1, 2), r(1, 2), r(1, 2), r(1, 2)]);
    }

    #[test]
    fn a2_cartan_and_coefficients() {
        let rs = build_root_system(TypeLabel::A(2)).unwrap();
        assert_eq!(*rs.cartan.get(0, 0), r(2, 1));
        assert_eq!(*rs.cartan.get(0, 1), r(-1, 1));
        let cm = coeff_matrices(&rs).unwrap();
        assert_eq!(*cm.n.get(0, 0), r(2, 3));
        assert_eq!(*cm.n.get(0, 1), r(1, 3));
        assert_eq!(*cm.n.get(1, 0), r(1, 3));
        assert_eq!(*cm.n.get(1, 1), r(2, 3));
    }

    #[test]
    fn a1_weight_is_half_root() {
        let rs = build_root_system(TypeLabel::A(1)).unwrap();
        let root = rs.simple_roots.column(0);
        assert_eq!(rat_dot(&root, &root), r(2, 1));
        let w = rs.fund_weights.column(0);
        assert_eq!(w, vec![r(1, 2), r(-1, 2)]);
        let cm = coeff_matrices(&rs).unwrap();
        assert_eq!(*cm.c.get(0, 0), r(2, 1));
        assert_eq!(*cm.n.get(0, 0), r(1, 2));
    }

    #[test]
    fn weight_coefficients_have_lemma_signs() {
        for label in all_types() {
            let rs = build_root_system(label).unwrap();
            let cm = coeff_matrices(&rs).unwrap();
            assert_eq!(cm.c.mul(&cm.n), RatMat::identity(rs.rank), "{label}");
            for j in 0..rs.rank {
                for i in 0..rs.rank {
                    let v = cm.n.get(j, i);
                    assert!(!v.is_negative(), "{label}: n[{j}][{i}] = {v}");
                    if i == j {
                        assert!(!v.is_zero(), "{label}: n[{j}][{j}] = 0");
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_report_examples() {
        let d4 = build_root_system(TypeLabel::D(4)).unwrap();
        let rep = orthogonality_check(&d4);
        assert!(rep.ok());
        let a2 = build_root_system(TypeLabel::A(2)).unwrap();
        let rep = orthogonality_check(&a2);
        assert_eq!(rep.pairings[0][0], r(1, 1));
        let a1 = build_root_system(TypeLabel::A(1)).unwrap();
        assert_eq!(orthogonality_check(&a1).pairings[0][0], r(1, 1));
    }

    #[test]
    fn normalized_weights_have_unit_length() {
        for label in all_types() {
            let rs = build_root_system(label).unwrap();
            for col in normalized_weights(&rs) {
                let len2: f64 = col.iter().map(|x| x * x).sum();
                assert!((len2 - 1.0).abs() < 1e-12, "{label}");
            }
        }
    }

    #[test]
    fn d4_normalized_weights_touch_only_second_column() {
        let rs = build_root_system(TypeLabel::D(4)).unwrap();
        let bar = normalized_weights(&rs);
        let plain = rs.fund_weights.to_f64();
        let s = 1.0 / 2.0f64.sqrt();
        for i in 0..4 {
            assert!((bar[1][i] - s * plain[i][1]).abs() < 1e-12);
            for j in [0usize, 2, 3] {
                assert!((bar[j][i] - plain[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn roots_expand_in_weights_via_c() {
        for label in all_types() {
            let rs = build_root_system(label).unwrap();
            let cm = coeff_matrices(&rs).unwrap();
            // alpha_i = sum_j c[i][j] omega_j, exactly
            let recon = rs.fund_weights.mul(&cm.c.transpose());
            assert_eq!(recon, rs.simple_roots, "{label}");
        }
    }
}
