//! The Bruhat-Tits tree of SL2 over Q_p at finite depth: canonical
//! vertex forms, the isometric SL2 action, tree distances via elementary
//! divisors, Busemann functions from the limit formula, and the
//! horofunction transformation law on the Borel subgroup.
//!
//! Vertices are homothety classes of rank-2 Z_p-lattices. Every class
//! has a unique basis of the shape ((p^m, 0), (a, 1)) with a taken
//! modulo p^m Z_p; the canonical representative of a stores the p-adic
//! digits of a from p^(-depth) up to p^(m-1), so all arithmetic stays in
//! exact rationals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::Mat2;
use crate::places::{is_prime, valuation, PlaceError, Rational};

#[derive(Debug, Error, PartialEq)]
pub enum BtError {
    #[error("increase depth: vertex needs digits below p^-{0}")]
    DepthOverflow(u32),
    #[error("truncation too small: need T >= {needed}")]
    TruncationTooSmall { needed: u64 },
    #[error("group element must have determinant 1")]
    NotUnimodular,
    #[error("transformation law requires an upper-triangular element")]
    NotUpperTriangular,
    #[error("basis matrix is singular")]
    SingularBasis,
    #[error(transparent)]
    Place(#[from] PlaceError),
}

/// A vertex in canonical form: the class of the lattice with basis
/// ((p^m, 0), (a, 1)), a reduced modulo p^m Z_p.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TreeVertex {
    pub m: i64,
    pub a: Rational,
}

impl TreeVertex {
    pub fn base() -> Self {
        TreeVertex {
            m: 0,
            a: Rational::zero(),
        }
    }
}

/// A boundary end: the distinguished end fixed by the upper-triangular
/// subgroup, or the end of a p-adic rational xi (the line through
/// (xi, 1)).
#[derive(Clone, Debug, PartialEq)]
pub enum End {
    Infinity,
    Rational(Rational),
}

/// Per-sample record of the horofunction transformation check.
#[derive(Clone, Debug, Serialize)]
pub struct TransformReport {
    pub shifts: Vec<i64>,
    /// the constant shift, present when all samples agree
    pub shift: Option<i64>,
    /// log_p |chi(g)|_p for the root character chi(diag(a, 1/a)) = a^2
    pub chi_log_p: i64,
    /// the proportionality constant shift / chi_log_p, when defined
    pub scale: Option<f64>,
    pub ok: bool,
    /// sample index and shift of the first disagreeing sample
    pub witness: Option<(usize, i64)>,
}

/// The tree of SL2(Q_p) with a fixed working depth: all vertex digits
/// live in [p^-depth, p^m).
#[derive(Clone, Debug)]
pub struct BtTree {
    pub p: u64,
    pub depth: u32,
}

impl BtTree {
    pub fn new(p: u64, depth: u32) -> Result<Self, BtError> {
        if !is_prime(p) {
            return Err(BtError::Place(PlaceError::NotPrime(p)));
        }
        Ok(BtTree { p, depth })
    }

    pub fn base(&self) -> TreeVertex {
        TreeVertex::base()
    }

    fn vp(&self, q: &Rational) -> i64 {
        valuation(q, self.p).expect("nonzero rational")
    }

    /// Digit of x at p^i, assuming v_p(x) >= i.
    fn digit(&self, x: &Rational, i: i64) -> u64 {
        let shifted = x * &Rational::prime_power(self.p, -i);
        // shifted is p-integral; its residue mod p is num * den^{-1}
        let p = self.p;
        let num = {
            let r = shifted.numer() % num_bigint::BigInt::from(p);
            let r: i64 = num_traits::ToPrimitive::to_i64(&r).unwrap();
            r.rem_euclid(p as i64) as u64
        };
        let den = {
            let r = shifted.denom() % num_bigint::BigInt::from(p);
            let r: i64 = num_traits::ToPrimitive::to_i64(&r).unwrap();
            r.rem_euclid(p as i64) as u64
        };
        debug_assert!(den != 0, "denominator divisible by p");
        // den^{-1} mod p by Fermat
        let mut inv = 1u64;
        let mut base = den % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                inv = inv * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        num * inv % p
    }

    /// Canonical representative of x modulo p^m Z_p: the digit sum of x
    /// from p^(v_p(x)) through p^(m-1).
    fn reduce_mod(&self, x: &Rational, m: i64) -> Result<Rational, BtError> {
        if x.is_zero() {
            return Ok(Rational::zero());
        }
        let v = self.vp(x);
        if v >= m {
            return Ok(Rational::zero());
        }
        if v < -(self.depth as i64) {
            return Err(BtError::DepthOverflow(self.depth));
        }
        let mut acc = Rational::zero();
        let mut cur = x.clone();
        for i in v..m {
            if cur.is_zero() {
                break;
            }
            if self.vp(&cur) > i {
                continue;
            }
            let d = self.digit(&cur, i);
            if d != 0 {
                let term = &Rational::from_int(d as i64) * &Rational::prime_power(self.p, i);
                acc = &acc + &term;
                cur = &cur - &term;
            }
        }
        Ok(acc)
    }

    /// Canonical form of the lattice class spanned by the columns of g.
    pub fn canonicalize(&self, g: &Mat2) -> Result<TreeVertex, BtError> {
        if g.det().is_zero() {
            return Err(BtError::SingularBasis);
        }
        let [mut x, mut y, mut u, mut w] = g.0.clone();
        // clear the bottom-left entry by unimodular column operations
        if !u.is_zero() {
            if w.is_zero() || self.vp(&u) < self.vp(&w) {
                std::mem::swap(&mut x, &mut y);
                std::mem::swap(&mut u, &mut w);
            }
            // now v_p(w) <= v_p(u), so u/w is a p-adic integer
            let q = &u / &w;
            x = &x - &(&q * &y);
            u = &u - &(&q * &w); // exactly zero
            debug_assert!(u.is_zero());
        }
        // scale columns by p-adic units to make them powers of p
        let alpha = self.vp(&x);
        let gamma = self.vp(&w);
        let y_unit_scaled = {
            let w_unit = &w * &Rational::prime_power(self.p, -gamma);
            &y / &w_unit
        };
        // homothety: divide by p^gamma
        let m = alpha - gamma;
        let a0 = &y_unit_scaled * &Rational::prime_power(self.p, -gamma);
        let a = self.reduce_mod(&a0, m)?;
        Ok(TreeVertex { m, a })
    }

    fn basis(&self, v: &TreeVertex) -> Mat2 {
        Mat2([
            Rational::prime_power(self.p, v.m),
            v.a.clone(),
            Rational::zero(),
            Rational::one(),
        ])
    }

    /// Act by g in SL2(Q): the class of g * (lattice of v).
    pub fn act(&self, g: &Mat2, v: &TreeVertex) -> Result<TreeVertex, BtError> {
        if g.det() != Rational::one() {
            return Err(BtError::NotUnimodular);
        }
        self.canonicalize(&g.mul(&self.basis(v)))
    }

    /// Tree distance: |v_p(det M) - 2 min_entry v_p(M)| for the relative
    /// position matrix M of any two lattice representatives.
    pub fn distance(&self, v: &TreeVertex, w: &TreeVertex) -> u64 {
        let bv = self.basis(v);
        let bw = self.basis(w);
        let m = bv.inverse().expect("basis is nonsingular").mul(&bw);
        let det_val = self.vp(&m.det());
        let min_val = m
            .0
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| self.vp(e))
            .min()
            .expect("nonsingular matrix has a nonzero entry");
        (det_val - 2 * min_val).unsigned_abs()
    }

    /// The vertex at arc length t on the geodesic ray from the base
    /// vertex toward the end.
    pub fn ray(&self, end: &End, t: u64) -> Result<TreeVertex, BtError> {
        match end {
            End::Infinity => Ok(TreeVertex {
                m: -(t as i64),
                a: Rational::zero(),
            }),
            End::Rational(xi) => {
                // the ray first ascends toward infinity for j steps when
                // xi has a pole, then descends along the digits of xi
                let j = if xi.is_zero() {
                    0
                } else {
                    (-self.vp(xi)).max(0)
                };
                let t = t as i64;
                if t <= j {
                    Ok(TreeVertex {
                        m: -t,
                        a: Rational::zero(),
                    })
                } else {
                    let m = t - 2 * j;
                    Ok(TreeVertex {
                        m,
                        a: self.reduce_mod(xi, m)?,
                    })
                }
            }
        }
    }

    /// Busemann function via the limit formula
    /// d(rho(T), rho(0)) - d(rho(T), x), which stabilizes exactly on a
    /// tree; requires T at least d(o, x) + 2 and verifies stabilization.
    pub fn busemann(&self, end: &End, x: &TreeVertex, t_truncation: u64) -> Result<i64, BtError> {
        let o = self.base();
        let needed = self.distance(&o, x) + 2;
        if t_truncation < needed {
            return Err(BtError::TruncationTooSmall { needed });
        }
        let eval = |t: u64| -> Result<i64, BtError> {
            let rt = self.ray(end, t)?;
            let r0 = self.ray(end, 0)?;
            Ok(self.distance(&rt, &r0) as i64 - self.distance(&rt, x) as i64)
        };
        let value = eval(t_truncation)?;
        debug_assert_eq!(value, eval(t_truncation - 1)?, "ray not yet stabilized");
        Ok(value)
    }

    /// Deterministic sample of distinct vertices within the working depth.
    pub fn sample_vertices(&self, seed: u64, count: usize) -> Vec<TreeVertex> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<TreeVertex> = vec![self.base()];
        let safety = self.depth as i64 - 2;
        while out.len() < count {
            let m: i64 = rng.gen_range(-4..=6);
            let low = (-safety).min(m - 1);
            let v0: i64 = rng.gen_range(low..=(m - 1));
            let mut a = Rational::zero();
            for i in v0..m {
                let d = rng.gen_range(0..self.p) as i64;
                if d != 0 {
                    a = &a + &(&Rational::from_int(d) * &Rational::prime_power(self.p, i));
                }
            }
            let vert = TreeVertex { m, a };
            if !out.contains(&vert) {
                out.push(vert);
            }
        }
        out
    }

    /// Verify the transformation law of the Busemann function at the
    /// distinguished end under an upper-triangular g: the shift
    /// beta(g.x) - beta(x) must be one constant across all samples,
    /// proportional to log_p |chi(g)|_p for the root character
    /// chi(diag(a, 1/a)) = a^2.
    pub fn horofunction_transform_check(
        &self,
        g: &Mat2,
        samples: &[TreeVertex],
    ) -> Result<TransformReport, BtError> {
        if g.det() != Rational::one() {
            return Err(BtError::NotUnimodular);
        }
        if !g.0[2].is_zero() {
            return Err(BtError::NotUpperTriangular);
        }
        let chi_log_p = -2 * self.vp(&g.0[0]); // |a^2|_p = p^(-2 v(a))
        let mut shifts = Vec::with_capacity(samples.len());
        for x in samples {
            let gx = self.act(g, x)?;
            let o = self.base();
            let t = self.distance(&o, x).max(self.distance(&o, &gx)) + 3;
            let bx = self.busemann(&End::Infinity, x, t)?;
            let bgx = self.busemann(&End::Infinity, &gx, t)?;
            shifts.push(bgx - bx);
        }
        let first = shifts.first().copied();
        let witness = shifts
            .iter()
            .enumerate()
            .find(|&(_, &s)| Some(s) != first)
            .map(|(i, &s)| (i, s));
        let consistent = witness.is_none();
        let chi_ok = chi_log_p != 0 || first == Some(0) || shifts.is_empty();
        let ok = consistent && chi_ok;
        let scale = match (consistent, first) {
            (true, Some(s)) if chi_log_p != 0 => Some(s as f64 / chi_log_p as f64),
            _ => None,
        };
        Ok(TransformReport {
            shifts,
            shift: if consistent { first } else { None },
            chi_log_p,
            scale,
            ok,
            witness,
        })
    }
}

/// diag(a, 1/a) as a rational matrix.
pub fn diag(a: Rational) -> Result<Mat2, BtError> {
    let inv = a.recip().map_err(|_| BtError::NotUnimodular)?;
    Ok(Mat2([a, Rational::zero(), Rational::zero(), inv]))
}

/// Upper unipotent (1, x; 0, 1).
pub fn unipotent(x: Rational) -> Mat2 {
    Mat2([Rational::one(), x, Rational::zero(), Rational::one()])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn tree(p: u64) -> BtTree {
        BtTree::new(p, 8).unwrap()
    }

    #[test]
    fn identity_fixes_the_base_vertex() {
        let t = tree(5);
        assert_eq!(t.act(&Mat2::identity(), &t.base()).unwrap(), t.base());
    }

    #[test]
    fn diag_p_moves_base_distance_one() {
        for p in [2u64, 3, 5] {
            let t = tree(p);
            let g = Mat2([
                Rational::from_int(p as i64),
                Rational::zero(),
                Rational::zero(),
                Rational::new(1, p as i64).unwrap(),
            ]);
            // not unimodular as written; use [[p,0],[0,1]] as a basis instead
            let v = t
                .canonicalize(&Mat2([
                    Rational::from_int(p as i64),
                    Rational::zero(),
                    Rational::zero(),
                    Rational::one(),
                ]))
                .unwrap();
            assert_eq!(t.distance(&t.base(), &v), 1);
            assert_eq!(v, TreeVertex { m: 1, a: Rational::zero() });
            // diag(p, 1/p) is unimodular and moves o by 2
            let w = t.act(&g, &t.base()).unwrap();
            assert_eq!(t.distance(&t.base(), &w), 2);
        }
    }

    #[test]
    fn integral_unipotents_fix_the_base_vertex() {
        let t = tree(3);
        for x in ["0", "1", "2", "-5", "9"] {
            assert_eq!(t.act(&unipotent(q(x)), &t.base()).unwrap(), t.base());
        }
        // non-integral unipotent moves it
        assert_ne!(t.act(&unipotent(q("1/3")), &t.base()).unwrap(), t.base());
    }

    #[test]
    fn distances_along_the_diagonal() {
        let t = tree(5);
        let v = |m: i64| TreeVertex {
            m,
            a: Rational::zero(),
        };
        assert_eq!(t.distance(&t.base(), &t.base()), 0);
        assert_eq!(t.distance(&t.base(), &v(1)), 1);
        assert_eq!(t.distance(&t.base(), &v(2)), 2);
        assert_eq!(t.distance(&v(-3), &v(2)), 5);
    }

    #[test]
    fn distance_sees_the_digit_part() {
        let t = tree(5);
        let v = TreeVertex {
            m: 1,
            a: q("1/5"),
        };
        assert_eq!(t.distance(&t.base(), &v), 3);
    }

    #[test]
    fn tree_is_p_plus_one_regular_at_the_base() {
        for p in [2u64, 3, 5] {
            let t = tree(p);
            let mut neighbors = Vec::new();
            for m in -2i64..=2 {
                // all canonical digit values for this m within small depth
                let digit_positions: Vec<i64> = (-2..m).collect();
                let mut stack = vec![Rational::zero()];
                for &i in &digit_positions {
                    let mut next = Vec::new();
                    for a in &stack {
                        for d in 0..p {
                            let term =
                                &Rational::from_int(d as i64) * &Rational::prime_power(p, i);
                            next.push(a + &term);
                        }
                    }
                    stack = next;
                }
                for a in stack {
                    let vert = TreeVertex {
                        m,
                        a: t.reduce_mod(&a, m).unwrap(),
                    };
                    if t.distance(&t.base(), &vert) == 1 && !neighbors.contains(&vert) {
                        neighbors.push(vert);
                    }
                }
            }
            assert_eq!(neighbors.len(), (p + 1) as usize, "p = {p}");
        }
    }

    #[test]
    fn action_is_by_isometries() {
        let t = tree(3);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let verts = t.sample_vertices(17, 40);
        let gens = [
            unipotent(q("1")),
            unipotent(q("1/3")),
            diag(q("3")).unwrap(),
            Mat2([q("0"), q("-1"), q("1"), q("0")]),
        ];
        for _ in 0..100 {
            let g = &gens[rng.gen_range(0..gens.len())];
            let h = &gens[rng.gen_range(0..gens.len())];
            let gh = g.mul(h);
            let v = &verts[rng.gen_range(0..verts.len())];
            let w = &verts[rng.gen_range(0..verts.len())];
            let gv = t.act(&gh, v).unwrap();
            let gw = t.act(&gh, w).unwrap();
            assert_eq!(t.distance(&gv, &gw), t.distance(v, w));
        }
    }

    #[test]
    fn ray_to_infinity_descends_through_diagonal_classes() {
        let t = tree(5);
        for n in 0..6u64 {
            let v = t.ray(&End::Infinity, n).unwrap();
            assert_eq!(v.m, -(n as i64));
            assert!(v.a.is_zero());
            assert_eq!(t.distance(&t.base(), &v), n);
        }
    }

    #[test]
    fn busemann_base_normalization_and_sign() {
        let t = tree(2);
        assert_eq!(t.busemann(&End::Infinity, &t.base(), 5).unwrap(), 0);
        let below = TreeVertex {
            m: 1,
            a: Rational::zero(),
        };
        assert_eq!(t.busemann(&End::Infinity, &below, 5).unwrap(), -1);
        let above = t.ray(&End::Infinity, 3).unwrap();
        assert_eq!(t.busemann(&End::Infinity, &above, 8).unwrap(), 3);
    }

    #[test]
    fn busemann_requires_large_truncation() {
        let t = tree(2);
        let far = TreeVertex {
            m: 4,
            a: Rational::zero(),
        };
        let err = t.busemann(&End::Infinity, &far, 3).unwrap_err();
        assert_eq!(err, BtError::TruncationTooSmall { needed: 6 });
    }

    #[test]
    fn busemann_is_unipotent_invariant() {
        let t = tree(2);
        for x_entry in ["1", "3", "1/2", "5/4"] {
            let u = unipotent(q(x_entry));
            for v in t.sample_vertices(3, 25) {
                let uv = t.act(&u, &v).unwrap();
                let tt = t.distance(&t.base(), &v).max(t.distance(&t.base(), &uv)) + 3;
                assert_eq!(
                    t.busemann(&End::Infinity, &uv, tt).unwrap(),
                    t.busemann(&End::Infinity, &v, tt).unwrap()
                );
            }
        }
    }

    #[test]
    fn busemann_stabilizes_past_the_bound() {
        let t = tree(3);
        for v in t.sample_vertices(9, 20) {
            let needed = t.distance(&t.base(), &v) + 2;
            let b0 = t.busemann(&End::Infinity, &v, needed).unwrap();
            let b1 = t.busemann(&End::Infinity, &v, needed + 1).unwrap();
            let b2 = t.busemann(&End::Infinity, &v, needed + 2).unwrap();
            assert_eq!(b0, b1);
            assert_eq!(b1, b2);
        }
    }

    #[test]
    fn busemann_along_a_rational_end() {
        let t = tree(2);
        // the ray toward the end xi = 1 passes (1, 1)
        let xi = End::Rational(q("1"));
        let on_ray = t.ray(&xi, 1).unwrap();
        assert_eq!(
            on_ray,
            TreeVertex {
                m: 1,
                a: q("1")
            }
        );
        assert_eq!(t.busemann(&xi, &on_ray, 6).unwrap(), 1);
        // the base of the ray scores zero
        assert_eq!(t.busemann(&xi, &t.base(), 6).unwrap(), 0);
        // a pole end ascends first
        let pole = End::Rational(q("1/2"));
        assert_eq!(
            t.ray(&pole, 1).unwrap(),
            TreeVertex {
                m: -1,
                a: Rational::zero()
            }
        );
        assert_eq!(
            t.ray(&pole, 2).unwrap(),
            TreeVertex {
                m: 0,
                a: q("1/2")
            }
        );
    }

    #[test]
    fn transform_check_identity_and_diagonals() {
        let t = tree(2);
        let samples = t.sample_vertices(41, 50);
        let id = t
            .horofunction_transform_check(&Mat2::identity(), &samples)
            .unwrap();
        assert!(id.ok);
        assert_eq!(id.shift, Some(0));

        let g = diag(q("2")).unwrap();
        let rep = t.horofunction_transform_check(&g, &samples).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.shift, Some(-2));
        assert_eq!(rep.chi_log_p, -2);
        assert_eq!(rep.scale, Some(1.0));

        let g4 = diag(q("4")).unwrap();
        let rep4 = t.horofunction_transform_check(&g4, &samples).unwrap();
        assert_eq!(rep4.shift, Some(-4));
    }

    #[test]
    fn transform_check_unipotent_shift_is_zero() {
        let t = tree(2);
        let samples = t.sample_vertices(43, 50);
        for x in ["1", "1/2", "3/4"] {
            let rep = t
                .horofunction_transform_check(&unipotent(q(x)), &samples)
                .unwrap();
            assert!(rep.ok);
            assert_eq!(rep.shift, Some(0));
            assert_eq!(rep.chi_log_p, 0);
        }
    }

    #[test]
    fn transform_check_rejects_lower_triangular() {
        let t = tree(2);
        let lower = Mat2([q("1"), q("0"), q("1"), q("1")]);
        let err = t
            .horofunction_transform_check(&lower, &t.sample_vertices(1, 5))
            .unwrap_err();
        assert_eq!(err, BtError::NotUpperTriangular);
    }

    #[test]
    fn borel_shifts_form_a_cocycle() {
        let t = tree(2);
        let samples = t.sample_vertices(47, 30);
        let shift_of = |g: &Mat2| {
            t.horofunction_transform_check(g, &samples)
                .unwrap()
                .shift
                .unwrap()
        };
        let g = diag(q("2")).unwrap();
        let h = g.mul(&unipotent(q("3/2")));
        let gh = g.mul(&h);
        assert_eq!(shift_of(&gh), shift_of(&g) + shift_of(&h));
    }

    #[test]
    fn depth_overflow_is_reported() {
        let t = BtTree::new(2, 3).unwrap();
        // unipotent with a deep pole pushes digits below p^-depth
        let u = unipotent(q("1/32"));
        let err = t.act(&u, &t.base()).unwrap_err();
        assert_eq!(err, BtError::DepthOverflow(3));
    }

    #[test]
    fn canonicalize_swaps_and_scales() {
        let t = tree(5);
        // a basis with the pivot in the first column and unit scalings
        let g = Mat2([q("3"), q("10"), q("5"), q("2")]);
        let v = t.canonicalize(&g).unwrap();
        // the class is determined by the lattice, so acting by a
        // stabilizer element of the lattice must not change it
        let col_swap = Mat2([q("0"), q("1"), q("1"), q("0")]);
        let w = t.canonicalize(&g.mul(&col_swap)).unwrap();
        assert_eq!(v, w);
    }
}
