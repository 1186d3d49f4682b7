//! Convolution over ℤ₄ᵐ and the fast Cut&Count join built on it.
//!
//! The radix-4 transform uses the imaginary unit as a 4th root of unity and
//! requires an exact division by 4ᵐ at the end, which GF(2ᵖ) cannot
//! provide. The fast path therefore lifts every field element to an
//! integer-coefficient polynomial (coefficients become Gaussian integers
//! during the transform), convolves exactly over ℤ[x], divides, and only
//! then reduces coefficients mod 2 and the polynomial mod Q back into the
//! field. Coefficient growth is bounded by 2^O(m), so a checked fixed-width
//! integer usually suffices; a big-integer instantiation is available as
//! the always-safe reference.
//!
//! The naive quadratic convolution is the semantic ground truth the fast
//! path is tested against.

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cutcount::{code_at, merge_anchor, CCTable, CODE_DEGREE};
use crate::gf2p::{FieldElem, FieldSpec};

#[derive(Debug, Error)]
pub enum Z4Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("inexact division by 4^m — transform implementation bug")]
    InexactDivision,
}

/// Dense table over ℤ₄ᵐ: entry index is the base-4 encoding of the tuple
/// (digit i in bits 2i..2i+1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Z4Table<T> {
    m: usize,
    values: Vec<T>,
}

impl<T: Clone> Z4Table<T> {
    pub fn new(m: usize, fill: T) -> Self {
        Z4Table {
            m,
            values: vec![fill; 1usize << (2 * m)],
        }
    }

    pub fn from_values(m: usize, values: Vec<T>) -> Self {
        assert_eq!(values.len(), 1usize << (2 * m));
        Z4Table { m, values }
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, idx: usize) -> &T {
        &self.values[idx]
    }

    pub fn set(&mut self, idx: usize, v: T) {
        self.values[idx] = v;
    }
}

/// Coordinate-wise subtraction in ℤ₄ᵐ on packed indices.
fn z4_sub(x: usize, y: usize, m: usize) -> usize {
    let mut out = 0usize;
    for i in 0..m {
        let d = ((x >> (2 * i)) & 3).wrapping_sub((y >> (2 * i)) & 3) & 3;
        out |= d << (2 * i);
    }
    out
}

/// Ring operations abstracted so the naive convolution can serve as an
/// oracle for any coefficient ring.
pub trait RingOps<T> {
    fn zero(&self) -> T;
    fn add(&self, a: &T, b: &T) -> T;
    fn mul(&self, a: &T, b: &T) -> T;
}

impl RingOps<FieldElem> for FieldSpec {
    fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldSpec::add(*self, *a, *b)
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        FieldSpec::mul(*self, *a, *b)
    }
}

/// The defining 16ᵐ-term double sum: `(f ∗ g)(x) = Σ_y f(y) · g(x − y)`
/// with coordinate-wise arithmetic mod 4.
pub fn naive_z4_convolution<T: Clone, R: RingOps<T>>(
    f: &Z4Table<T>,
    g: &Z4Table<T>,
    ring: &R,
) -> Result<Z4Table<T>, Z4Error> {
    if f.m != g.m {
        return Err(Z4Error::DimensionMismatch(f.m, g.m));
    }
    let m = f.m;
    let len = 1usize << (2 * m);
    let mut out = Z4Table::new(m, ring.zero());
    for x in 0..len {
        let mut acc = ring.zero();
        for y in 0..len {
            let term = ring.mul(&f.values[y], &g.values[z4_sub(x, y, m)]);
            acc = ring.add(&acc, &term);
        }
        out.values[x] = acc;
    }
    Ok(out)
}

/// Exact integers for the lifted transform. `i64`/`i128` panic on overflow
/// rather than truncate; `BigInt` never overflows.
pub trait ExactInt: Clone + PartialEq {
    const NAME: &'static str;
    fn zero() -> Self;
    fn from_bit(b: bool) -> Self;
    fn is_zero(&self) -> bool;
    fn is_odd(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// `None` when the division leaves a remainder.
    fn div_exact(&self, d: i64) -> Option<Self>;
    /// Bit length of the absolute value.
    fn bits(&self) -> u64;
}

macro_rules! impl_exact_int_prim {
    ($ty:ty, $name:literal) => {
        impl ExactInt for $ty {
            const NAME: &'static str = $name;
            fn zero() -> Self {
                0
            }
            fn from_bit(b: bool) -> Self {
                b as $ty
            }
            fn is_zero(&self) -> bool {
                *self == 0
            }
            fn is_odd(&self) -> bool {
                self & 1 == 1
            }
            fn add(&self, o: &Self) -> Self {
                self.checked_add(*o).expect("lifted coefficient overflow")
            }
            fn sub(&self, o: &Self) -> Self {
                self.checked_sub(*o).expect("lifted coefficient overflow")
            }
            fn mul(&self, o: &Self) -> Self {
                self.checked_mul(*o).expect("lifted coefficient overflow")
            }
            fn div_exact(&self, d: i64) -> Option<Self> {
                let d = d as $ty;
                (self % d == 0).then(|| self / d)
            }
            fn bits(&self) -> u64 {
                let mag = self.unsigned_abs();
                (<$ty>::BITS - mag.leading_zeros()) as u64
            }
        }
    };
}

impl_exact_int_prim!(i64, "i64");
impl_exact_int_prim!(i128, "i128");

impl ExactInt for BigInt {
    const NAME: &'static str = "bigint";
    fn zero() -> Self {
        BigInt::ZERO
    }
    fn from_bit(b: bool) -> Self {
        BigInt::from(b as u8)
    }
    fn is_zero(&self) -> bool {
        *self == BigInt::ZERO
    }
    fn is_odd(&self) -> bool {
        self.bit(0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, d: i64) -> Option<Self> {
        let d = BigInt::from(d);
        (self % &d == BigInt::ZERO).then(|| self / &d)
    }
    fn bits(&self) -> u64 {
        self.bits()
    }
}

/// A Gaussian-integer polynomial: `re + i·im`, both of fixed capacity.
#[derive(Clone)]
struct GaussPoly<I> {
    re: Vec<I>,
    im: Vec<I>,
}

impl<I: ExactInt> GaussPoly<I> {
    fn zero(len: usize) -> Self {
        GaussPoly {
            re: vec![I::zero(); len],
            im: vec![I::zero(); len],
        }
    }

    fn lift(elem: FieldElem, p: usize, len: usize) -> Self {
        let mut out = Self::zero(len);
        for i in 0..p {
            out.re[i] = I::from_bit(elem.0 >> i & 1 == 1);
        }
        out
    }

    fn add(&self, o: &Self) -> Self {
        GaussPoly {
            re: self.re.iter().zip(&o.re).map(|(a, b)| a.add(b)).collect(),
            im: self.im.iter().zip(&o.im).map(|(a, b)| a.add(b)).collect(),
        }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussPoly {
            re: self.re.iter().zip(&o.re).map(|(a, b)| a.sub(b)).collect(),
            im: self.im.iter().zip(&o.im).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    /// Multiplication by the imaginary unit: (re, im) → (−im, re).
    fn mul_i(&self) -> Self {
        GaussPoly {
            re: self.im.iter().map(|x| I::zero().sub(x)).collect(),
            im: self.re.clone(),
        }
    }

    /// Schoolbook product over the first `deg` coefficients of each factor,
    /// accumulated into `self`.
    fn add_product(&mut self, a: &Self, b: &Self, deg: usize) {
        // (ar + i·ai)(br + i·bi) = (ar·br − ai·bi) + i(ar·bi + ai·br)
        for i in 0..deg {
            let (ar, ai) = (&a.re[i], &a.im[i]);
            let a_zero = ar.is_zero() && ai.is_zero();
            if a_zero {
                continue;
            }
            for j in 0..deg {
                let (br, bi) = (&b.re[j], &b.im[j]);
                if br.is_zero() && bi.is_zero() {
                    continue;
                }
                let k = i + j;
                self.re[k] = self.re[k].add(&ar.mul(br).sub(&ai.mul(bi)));
                self.im[k] = self.im[k].add(&ar.mul(bi).add(&ai.mul(br)));
            }
        }
    }

    fn max_bits(&self) -> u64 {
        self.re
            .iter()
            .chain(&self.im)
            .map(|x| x.bits())
            .max()
            .unwrap_or(0)
    }
}

/// Observations of the exact-integer transform.
#[derive(Debug, Default, Clone, Copy)]
pub struct ConvReport {
    /// Largest coefficient bit length seen anywhere in the transform.
    pub max_coeff_bits: u64,
}

/// Radix-4 butterflies along every coordinate. `inverse` conjugates the
/// root of unity (the final division by 4ᵐ is the caller's job).
fn transform<I: ExactInt>(values: &mut [GaussPoly<I>], m: usize, inverse: bool) {
    for coord in 0..m {
        let stride = 1usize << (2 * coord);
        let block = stride << 2;
        let mut base = 0;
        while base < values.len() {
            for off in 0..stride {
                let i0 = base + off;
                let (i1, i2, i3) = (i0 + stride, i0 + 2 * stride, i0 + 3 * stride);
                let t0 = values[i0].clone();
                let t1 = values[i1].clone();
                let t2 = values[i2].clone();
                let t3 = values[i3].clone();
                let t1_i = t1.mul_i();
                let t3_i = t3.mul_i();
                let (f1, f3) = if !inverse {
                    // F1 = t0 + i·t1 − t2 − i·t3, F3 = t0 − i·t1 − t2 + i·t3
                    (
                        t0.add(&t1_i).sub(&t2).sub(&t3_i),
                        t0.sub(&t1_i).sub(&t2).add(&t3_i),
                    )
                } else {
                    (
                        t0.sub(&t1_i).sub(&t2).add(&t3_i),
                        t0.add(&t1_i).sub(&t2).sub(&t3_i),
                    )
                };
                values[i0] = t0.add(&t1).add(&t2).add(&t3);
                values[i1] = f1;
                values[i2] = t0.sub(&t1).add(&t2).sub(&t3);
                values[i3] = f3;
            }
            base += block;
        }
    }
}

/// Fast ℤ₄ᵐ convolution over GF(2ᵖ) by lifting to ℤ[x]: transform both
/// inputs, multiply pointwise as Gaussian-integer polynomials, inverse
/// transform, divide exactly by 4ᵐ, then reduce mod 2 and mod Q. Equals
/// [`naive_z4_convolution`] exactly.
pub fn fast_z4_convolution<I: ExactInt>(
    f: &Z4Table<FieldElem>,
    g: &Z4Table<FieldElem>,
    spec: FieldSpec,
) -> Result<(Z4Table<FieldElem>, ConvReport), Z4Error> {
    if f.m != g.m {
        return Err(Z4Error::DimensionMismatch(f.m, g.m));
    }
    let m = f.m;
    let p = spec.degree() as usize;
    let prod_len = 2 * p - 1;
    let mut report = ConvReport::default();

    let lift = |t: &Z4Table<FieldElem>| -> Vec<GaussPoly<I>> {
        t.values
            .iter()
            .map(|&e| GaussPoly::lift(e, p, prod_len))
            .collect()
    };
    let mut fa = lift(f);
    let mut ga = lift(g);
    transform(&mut fa, m, false);
    transform(&mut ga, m, false);

    let mut prod: Vec<GaussPoly<I>> = Vec::with_capacity(fa.len());
    for (a, b) in fa.iter().zip(&ga) {
        let mut acc = GaussPoly::zero(prod_len);
        acc.add_product(a, b, p);
        report.max_coeff_bits = report.max_coeff_bits.max(acc.max_bits());
        prod.push(acc);
    }
    drop(fa);
    drop(ga);

    transform(&mut prod, m, true);

    let scale = 1i64 << (2 * m);
    let mut out = Z4Table::new(m, FieldElem::ZERO);
    for (idx, poly) in prod.iter().enumerate() {
        report.max_coeff_bits = report.max_coeff_bits.max(poly.max_bits());
        let mut packed: u128 = 0;
        for (c, coeff) in poly.re.iter().enumerate() {
            let exact = coeff.div_exact(scale).ok_or(Z4Error::InexactDivision)?;
            if exact.is_odd() {
                packed |= 1u128 << c;
            }
        }
        for coeff in &poly.im {
            let exact = coeff.div_exact(scale).ok_or(Z4Error::InexactDivision)?;
            debug_assert!(
                exact.is_zero(),
                "imaginary residue in a real convolution"
            );
        }
        out.values[idx] = FieldElem(spec.reduce_wide(packed));
    }
    Ok((out, report))
}

/// Total degree of a packed Cut&Count state key.
fn key_degree(key: u64, m: usize) -> u32 {
    (0..m).map(|s| CODE_DEGREE[code_at(key, s) as usize]).sum()
}

/// Fast Cut&Count join: states are ℤ₄ digit strings, so the joint table is
/// a ℤ₄ᵐ convolution — except that digit sums conflate some invalid
/// combinations (opposite sides, double-discharge) with valid ones. Those
/// collisions all overshoot in total degree, so convolving separately per
/// total degree and keeping only entries whose digit-implied degree matches
/// filters them exactly. Equals [`crate::cutcount::cc_join_naive`] on all
/// inputs.
pub fn cc_join_fast(spec: FieldSpec, a: &CCTable, b: &CCTable) -> CCTable {
    assert_eq!(a.bag, b.bag, "join children must share the bag");
    let m = a.bag.len();
    // Coefficient growth fits comfortably in i64 for small bags; fall back
    // to i128 for wide ones (bound ≈ (2m+1)·2p·64^m).
    if m <= 8 {
        cc_join_fast_with::<i64>(spec, a, b)
    } else {
        cc_join_fast_with::<i128>(spec, a, b)
    }
}

/// Fast join with an explicit coefficient type (the big-integer
/// instantiation is the overflow-proof reference).
pub fn cc_join_fast_with<I: ExactInt>(spec: FieldSpec, a: &CCTable, b: &CCTable) -> CCTable {
    assert_eq!(a.bag, b.bag, "join children must share the bag");
    let m = a.bag.len();
    let max_degree = 2 * m as u32;

    let partition = |t: &CCTable| -> HashMap<u32, Z4Table<FieldElem>> {
        let mut parts: HashMap<u32, Z4Table<FieldElem>> = HashMap::new();
        for (&key, &val) in &t.acc {
            let d = key_degree(key, m);
            parts
                .entry(d)
                .or_insert_with(|| Z4Table::new(m, FieldElem::ZERO))
                .values[key as usize] = val;
        }
        parts
    };
    let pa = partition(a);
    let pb = partition(b);

    let mut out = CCTable {
        bag: a.bag.clone(),
        anchor: merge_anchor(a, b),
        acc: HashMap::new(),
    };
    let mut by_degree: HashMap<u32, Z4Table<FieldElem>> = HashMap::new();
    for (&da, ta) in &pa {
        for (&db, tb) in &pb {
            // Entries of total degree beyond 2m can never decode validly.
            if da + db > max_degree {
                continue;
            }
            let (conv, _report) =
                fast_z4_convolution::<I>(ta, tb, spec).expect("dimensions match");
            match by_degree.entry(da + db) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    let acc = e.get_mut();
                    for (slot, v) in conv.values.into_iter().enumerate() {
                        acc.values[slot] = spec.add(acc.values[slot], v);
                    }
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(conv);
                }
            }
        }
    }
    for (d, table) in by_degree {
        for (key, &val) in table.values.iter().enumerate() {
            if !val.is_zero() && key_degree(key as u64, m) == d {
                let entry = out.acc.entry(key as u64).or_insert(FieldElem::ZERO);
                *entry = spec.add(*entry, val);
            }
        }
    }
    out.acc.retain(|_, v| !v.is_zero());
    out
}
