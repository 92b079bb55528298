//! Partitions, signatures, interlacing, boxed enumeration, conjugation, and
//! the reverse-lexicographic order.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// An integer partition: weakly decreasing non-negative parts, trailing
/// zeros stripped. Formula code reads `part(i)` which returns 0 beyond the
/// stored length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "partition parts must be weakly decreasing: {parts:?}"
            )));
        }
        Ok(Self::new_unchecked(parts))
    }

    pub fn new_unchecked(mut parts: Vec<u32>) -> Self {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// 1-based part accessor, 0 beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i == 0 || i > self.parts.len() {
            0
        } else {
            self.parts[i - 1]
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// |lambda|
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|&p| p as u64).sum()
    }

    /// Transposed partition: lambda'_i = #{j : lambda_j >= i}.
    pub fn conjugate(&self) -> Partition {
        let max = self.part(1);
        let parts = (1..=max)
            .map(|i| self.parts.iter().filter(|&&p| p >= i).count() as u32)
            .collect();
        Partition::new_unchecked(parts)
    }

    /// Add 1 to the first `n` parts (inverse of the shift reduction).
    pub fn shifted(&self, n: usize, by: u32) -> Partition {
        let mut parts: Vec<u32> = (1..=n.max(self.len())).map(|i| self.part(i) + by).collect();
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Partition { parts }
    }

    /// View as a signature of explicit length `n` (errors if too short).
    pub fn to_signature(&self, n: usize) -> Result<Signature> {
        if self.len() > n {
            return Err(Error::InvalidInput(format!(
                "partition {self} has more than {n} parts"
            )));
        }
        Signature::new((1..=n).map(|i| self.part(i) as i64).collect())
    }

    /// Text format `[3,1]`; the empty partition is `[]`.
    pub fn parse(s: &str) -> Result<Partition> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| Error::InvalidInput(format!("partition must look like [3,1]: {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::InvalidInput(format!("bad part {p:?}: {e}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Partition::new(parts)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A signature: weakly decreasing integers with an explicit length.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Signature {
    parts: Vec<i64>,
}

impl Signature {
    pub fn new(parts: Vec<i64>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput(
                "signatures have positive length".into(),
            ));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!(
                "signature parts must be weakly decreasing: {parts:?}"
            )));
        }
        Ok(Signature { parts })
    }

    pub fn parts(&self) -> &[i64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based accessor; indexing past the end is a caller bug.
    pub fn part(&self, i: usize) -> i64 {
        self.parts[i - 1]
    }

    pub fn last(&self) -> i64 {
        *self.parts.last().unwrap()
    }

    pub fn size(&self) -> i64 {
        self.parts.iter().sum()
    }

    /// `lambda^rev = (-lambda_n >= ... >= -lambda_1)`.
    pub fn reversed(&self) -> Signature {
        Signature {
            parts: self.parts.iter().rev().map(|&p| -p).collect(),
        }
    }

    /// Subtract the last part everywhere, producing a partition.
    pub fn reduce(&self) -> (Partition, i64) {
        let m = self.last();
        let parts = self.parts.iter().map(|&p| (p - m) as u32).collect();
        (Partition::new_unchecked(parts), m)
    }

    /// Text format `sig[2,-1,-1]`.
    pub fn parse(s: &str) -> Result<Signature> {
        let t = s.trim();
        let inner = t
            .strip_prefix("sig[")
            .and_then(|x| x.strip_suffix(']'))
            .ok_or_else(|| {
                Error::InvalidInput(format!("signature must look like sig[2,-1]: {s:?}"))
            })?;
        let parts = inner
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<i64>()
                    .map_err(|e| Error::InvalidInput(format!("bad part {p:?}: {e}")))
            })
            .collect::<Result<Vec<i64>>>()?;
        Signature::new(parts)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sig[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// `mu` interlaces `lambda`: `lambda_i >= mu_i >= lambda_{i+1}` for all `i`.
pub fn interlaces(mu: &Partition, lam: &Partition) -> bool {
    let n = lam.len().max(mu.len()) + 1;
    (1..=n).all(|i| lam.part(i) >= mu.part(i) && mu.part(i) >= lam.part(i + 1))
}

/// Interlacing for signatures (`mu` one shorter than `lambda`).
pub fn interlaces_sig(mu: &Signature, lam: &Signature) -> bool {
    if mu.len() + 1 != lam.len() {
        return false;
    }
    (1..=mu.len()).all(|i| lam.part(i) >= mu.part(i) && mu.part(i) >= lam.part(i + 1))
}

/// All `mu` with at most `rows` parts interlacing `lambda`, in
/// reverse-lexicographic descending order. In the branching rule `rows` is
/// one less than the number of variables; a shape like `(2,0)` written with
/// a trailing zero means `rows = 1` here. The count is
/// `prod_{i=1..rows} (lambda_i - lambda_{i+1} + 1)`.
pub fn enumerate_interlacing(lam: &Partition, rows: usize) -> Vec<Partition> {
    if lam.len() > rows + 1 {
        return Vec::new(); // mu_i <= lam_i and mu_i >= lam_{i+1} > 0 impossible
    }
    if rows == 0 {
        return vec![Partition::empty()]; // lam has at most one part here
    }
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::with_capacity(rows);
    fn rec(
        lam: &Partition,
        i: usize,
        rows: usize,
        current: &mut Vec<u32>,
        out: &mut Vec<Partition>,
    ) {
        if i > rows {
            out.push(Partition::new_unchecked(current.clone()));
            return;
        }
        let hi = lam.part(i);
        let lo = lam.part(i + 1);
        // descending so the output is revlex-descending
        let mut v = hi;
        loop {
            current.push(v);
            rec(lam, i + 1, rows, current, out);
            current.pop();
            if v == lo {
                break;
            }
            v -= 1;
        }
    }
    rec(lam, 1, rows, &mut current, &mut out);
    out
}

/// Interlacing predecessors of a signature (length drops by one).
pub fn enumerate_interlacing_sig(lam: &Signature) -> Vec<Signature> {
    let n = lam.len();
    if n == 1 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<i64> = Vec::with_capacity(n - 1);
    fn rec(lam: &Signature, i: usize, current: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if i == lam.len() {
            out.push(Signature::new(current.clone()).unwrap());
            return;
        }
        let hi = lam.part(i);
        let lo = lam.part(i + 1);
        let mut v = hi;
        loop {
            current.push(v);
            rec(lam, i + 1, current, out);
            current.pop();
            if v == lo {
                break;
            }
            v -= 1;
        }
    }
    rec(lam, 1, &mut current, &mut out);
    out
}

/// `Box(l, m)`: all partitions with first part <= l and length <= m,
/// reverse-lexicographic descending. Count = C(l+m, m).
pub fn enumerate_box(l: u32, m: u32) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::new();
    fn rec(l: u32, m: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
        out.push(Partition::new_unchecked(current.clone()));
        if current.len() as u32 >= m {
            return;
        }
        let hi = current.last().copied().unwrap_or(l);
        for v in (1..=hi).rev() {
            current.push(v);
            rec(l, m, current, out);
            current.pop();
        }
    }
    rec(l, m, &mut current, &mut out);
    out.sort_by(|a, b| revlex_cmp(b, a));
    out
}

/// Reverse-lexicographic comparison: `mu < lambda` iff the first nonzero
/// `lambda_i - mu_i` is positive.
pub fn revlex_cmp(mu: &Partition, lam: &Partition) -> Ordering {
    let n = mu.len().max(lam.len());
    for i in 1..=n {
        match lam.part(i).cmp(&mu.part(i)) {
            Ordering::Equal => continue,
            Ordering::Greater => return Ordering::Less, // mu < lambda
            Ordering::Less => return Ordering::Greater,
        }
    }
    Ordering::Equal
}
