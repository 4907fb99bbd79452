//! GF(2^m) arithmetic for 1 <= m <= 16 and the small dense linear algebra the
//! coding layer needs (span tests, rank, solving for combination
//! coefficients).
//!
//! Elements are polynomials over GF(2) stored as bit masks and reduced by an
//! irreducible modulus. Addition is XOR; multiplication is carry-less
//! polynomial multiplication followed by reduction. Every element carries its
//! field spec so that values from different fields can never be combined
//! silently.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("field degree {0} outside the supported range 1..=16")]
    DegreeOutOfRange(u32),
    #[error("modulus {modulus:#x} has degree {actual}, expected {expected}")]
    ModulusDegree {
        modulus: u32,
        actual: u32,
        expected: u32,
    },
    #[error("modulus {0:#x} is reducible over GF(2)")]
    ReducibleModulus(u32),
    #[error("mixed field specs: {0} vs {1}")]
    MixedFields(FieldSpec, FieldSpec),
    #[error("{value} is not an element of {field}")]
    ElementOutOfRange { value: u32, field: FieldSpec },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Default modulus per degree, lowest-weight irreducible polynomial first in
/// lexicographic order. Index i holds the modulus for m = i + 1.
const DEFAULT_MODULI: [u32; 16] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B, 0x203, 0x409, 0x805, 0x1009, 0x201B, 0x402B,
    0x8003, 0x1002D,
];

fn poly_degree(p: u32) -> i32 {
    31 - p.leading_zeros() as i32
}

fn poly_rem(mut a: u32, m: u32) -> u32 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg(p)/2.
pub fn is_irreducible(p: u32) -> bool {
    let deg = poly_degree(p);
    if deg < 1 {
        return false;
    }
    for d in 1..=(deg / 2) {
        for q in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

/// A concrete representation of GF(2^m): the degree and the irreducible
/// modulus used for reduction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldSpec {
    m: u8,
    modulus: u32,
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; modulus {:#x})", self.m, self.modulus)
    }
}

impl FieldSpec {
    pub fn new(m: u32, modulus: u32) -> Result<Self, FieldError> {
        if !(1..=16).contains(&m) {
            return Err(FieldError::DegreeOutOfRange(m));
        }
        let actual = poly_degree(modulus);
        if actual != m as i32 {
            return Err(FieldError::ModulusDegree {
                modulus,
                actual: actual.max(0) as u32,
                expected: m,
            });
        }
        if !is_irreducible(modulus) {
            return Err(FieldError::ReducibleModulus(modulus));
        }
        Ok(FieldSpec {
            m: m as u8,
            modulus,
        })
    }

    /// The field of degree `m` with the crate's default modulus.
    pub fn with_default_modulus(m: u32) -> Result<Self, FieldError> {
        if !(1..=16).contains(&m) {
            return Err(FieldError::DegreeOutOfRange(m));
        }
        FieldSpec::new(m, DEFAULT_MODULI[(m - 1) as usize])
    }

    /// Smallest field with at least `want` elements, used as the solver
    /// default for random multicast coding.
    pub fn smallest_with_order(want: u32) -> Result<Self, FieldError> {
        let mut m = 1;
        while m <= 16 && (1u32 << m) < want {
            m += 1;
        }
        FieldSpec::with_default_modulus(m)
    }

    pub fn m(&self) -> u32 {
        self.m as u32
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of elements, 2^m.
    pub fn order(&self) -> u32 {
        1 << self.m
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            bits: 0,
            field: *self,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            bits: 1,
            field: *self,
        }
    }

    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value >= self.order() {
            return Err(FieldError::ElementOutOfRange {
                value,
                field: *self,
            });
        }
        Ok(FieldElement {
            bits: value as u16,
            field: *self,
        })
    }

    /// Uniformly random element (zero included).
    pub fn random(&self, rng: &mut impl rand::Rng) -> FieldElement {
        FieldElement {
            bits: rng.gen_range(0..self.order()) as u16,
            field: *self,
        }
    }

    /// Every element of the field in ascending bit order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        let spec = *self;
        (0..self.order()).map(move |v| FieldElement {
            bits: v as u16,
            field: spec,
        })
    }
}

/// An element of a specific GF(2^m).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    bits: u16,
    field: FieldSpec,
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

impl FieldElement {
    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn checked_add(self, rhs: FieldElement) -> Result<FieldElement, FieldError> {
        if self.field != rhs.field {
            return Err(FieldError::MixedFields(self.field, rhs.field));
        }
        Ok(FieldElement {
            bits: self.bits ^ rhs.bits,
            field: self.field,
        })
    }

    pub fn checked_mul(self, rhs: FieldElement) -> Result<FieldElement, FieldError> {
        if self.field != rhs.field {
            return Err(FieldError::MixedFields(self.field, rhs.field));
        }
        let mut acc: u32 = 0;
        let mut a = self.bits as u32;
        let mut b = rhs.bits as u32;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            a <<= 1;
            b >>= 1;
        }
        Ok(FieldElement {
            bits: poly_rem(acc, self.field.modulus) as u16,
            field: self.field,
        })
    }

    /// Multiplicative inverse via Fermat: a^(2^m - 2).
    pub fn inverse(self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let mut exp = (1u32 << self.field.m) - 2;
        let mut base = self;
        let mut acc = self.field.one();
        while exp != 0 {
            if exp & 1 != 0 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        Ok(acc)
    }
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;

    /// Panics when the operands belong to different fields; use
    /// [`FieldElement::checked_add`] at trust boundaries.
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.checked_add(rhs).expect("field mismatch in add")
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;

    /// Panics when the operands belong to different fields; use
    /// [`FieldElement::checked_mul`] at trust boundaries.
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.checked_mul(rhs).expect("field mismatch in mul")
    }
}

/// A global coding vector: one field element per source, in declared source
/// order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CodingVector {
    entries: Vec<FieldElement>,
}

impl fmt::Display for CodingVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl CodingVector {
    pub fn new(entries: Vec<FieldElement>) -> Result<Self, FieldError> {
        assert!(!entries.is_empty(), "coding vectors have at least one entry");
        let field = entries[0].field();
        for e in &entries[1..] {
            if e.field() != field {
                return Err(FieldError::MixedFields(field, e.field()));
            }
        }
        Ok(CodingVector { entries })
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        CodingVector {
            entries: vec![field.zero(); n],
        }
    }

    /// The k-th standard unit vector (0-based).
    pub fn unit(field: FieldSpec, n: usize, k: usize) -> Self {
        let mut v = CodingVector::zero(field, n);
        v.entries[k] = field.one();
        v
    }

    pub fn all_ones(field: FieldSpec, n: usize) -> Self {
        CodingVector {
            entries: vec![field.one(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn field(&self) -> FieldSpec {
        self.entries[0].field()
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.entries
    }

    pub fn get(&self, k: usize) -> FieldElement {
        self.entries[k]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FieldElement::is_zero)
    }

    pub fn is_all_ones(&self) -> bool {
        self.entries.iter().all(|e| *e == e.field().one())
    }

    pub fn checked_add(&self, rhs: &CodingVector) -> Result<CodingVector, FieldError> {
        if self.len() != rhs.len() {
            return Err(FieldError::LengthMismatch(self.len(), rhs.len()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Result<_, _>>()?;
        Ok(CodingVector { entries })
    }

    pub fn scale(&self, c: FieldElement) -> Result<CodingVector, FieldError> {
        let entries = self
            .entries
            .iter()
            .map(|a| a.checked_mul(c))
            .collect::<Result<_, _>>()?;
        Ok(CodingVector { entries })
    }

    /// Inner product with a tuple of source symbols.
    pub fn dot(&self, symbols: &[FieldElement]) -> Result<FieldElement, FieldError> {
        if self.len() != symbols.len() {
            return Err(FieldError::LengthMismatch(self.len(), symbols.len()));
        }
        let mut acc = self.field().zero();
        for (a, x) in self.entries.iter().zip(symbols) {
            acc = acc.checked_add(a.checked_mul(*x)?)?;
        }
        Ok(acc)
    }
}

fn check_uniform(field: FieldSpec, vectors: &[CodingVector]) -> Result<usize, FieldError> {
    let mut width = None;
    for v in vectors {
        if v.field() != field {
            return Err(FieldError::MixedFields(field, v.field()));
        }
        match width {
            None => width = Some(v.len()),
            Some(w) if w != v.len() => return Err(FieldError::LengthMismatch(w, v.len())),
            _ => {}
        }
    }
    Ok(width.unwrap_or(0))
}

/// Finds coefficients c with sum(c_i * basis_i) = target, or None when the
/// target is outside the span. Gaussian elimination with deterministic
/// pivoting: columns left to right, first usable row.
pub fn solve_combination(
    field: FieldSpec,
    basis: &[CodingVector],
    target: &CodingVector,
) -> Result<Option<Vec<FieldElement>>, FieldError> {
    let width = check_uniform(field, basis)?;
    if target.field() != field {
        return Err(FieldError::MixedFields(field, target.field()));
    }
    if !basis.is_empty() && target.len() != width {
        return Err(FieldError::LengthMismatch(width, target.len()));
    }
    let n = target.len();
    // Rows carry the evolving vector plus the combination of original basis
    // rows that produced it.
    let mut rows: Vec<(Vec<FieldElement>, Vec<FieldElement>)> = basis
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut tag = vec![field.zero(); basis.len()];
            tag[i] = field.one();
            (v.entries().to_vec(), tag)
        })
        .collect();
    let mut residue = target.entries().to_vec();
    let mut coeffs = vec![field.zero(); basis.len()];
    let mut pivot_row = 0usize;
    for col in 0..n {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r].0[col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = rows[pivot_row].0[col].inverse().expect("pivot is nonzero");
        for e in rows[pivot_row].0.iter_mut() {
            *e = *e * inv;
        }
        for e in rows[pivot_row].1.iter_mut() {
            *e = *e * inv;
        }
        let (pivot_vec, pivot_tag) = {
            let r = &rows[pivot_row];
            (r.0.clone(), r.1.clone())
        };
        for r in rows.iter_mut().skip(pivot_row + 1) {
            let factor = r.0[col];
            if factor.is_zero() {
                continue;
            }
            for (e, p) in r.0.iter_mut().zip(&pivot_vec) {
                *e = *e + *p * factor;
            }
            for (e, p) in r.1.iter_mut().zip(&pivot_tag) {
                *e = *e + *p * factor;
            }
        }
        let factor = residue[col];
        if !factor.is_zero() {
            for (e, p) in residue.iter_mut().zip(&pivot_vec) {
                *e = *e + *p * factor;
            }
            for (e, p) in coeffs.iter_mut().zip(&pivot_tag) {
                *e = *e + *p * factor;
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    // Any leftover nonzero residue entry means the target is outside the span.
    if residue.iter().any(|e| !e.is_zero()) {
        return Ok(None);
    }
    Ok(Some(coeffs))
}

/// True iff `v` is a linear combination of `basis`. The zero vector is in the
/// span of the empty set.
pub fn in_span(
    field: FieldSpec,
    basis: &[CodingVector],
    v: &CodingVector,
) -> Result<bool, FieldError> {
    Ok(solve_combination(field, basis, v)?.is_some())
}

/// Rank of a list of vectors.
pub fn rank(field: FieldSpec, vectors: &[CodingVector]) -> Result<usize, FieldError> {
    let n = check_uniform(field, vectors)?;
    let mut rows: Vec<Vec<FieldElement>> =
        vectors.iter().map(|v| v.entries().to_vec()).collect();
    let mut pivot_row = 0usize;
    for col in 0..n {
        let Some(found) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = rows[pivot_row][col].inverse().expect("pivot is nonzero");
        for e in rows[pivot_row].iter_mut() {
            *e = *e * inv;
        }
        let pivot_vec = rows[pivot_row].clone();
        for r in rows.iter_mut().skip(pivot_row + 1) {
            let factor = r[col];
            if factor.is_zero() {
                continue;
            }
            for (e, p) in r.iter_mut().zip(&pivot_vec) {
                *e = *e + *p * factor;
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    Ok(pivot_row)
}
