//! Reader for the slice transcription the fixture JSON is generated from:
//! `NAME(:,:,a,b) = [q11, q12; q21, q22]`, one frontal slice of a
//! 2×2×2×2 tensor per line, `#` comments.

use std::collections::BTreeMap;

use crate::qtensor::{QTensor, Shape};
use crate::quat::Quaternion;

/// Parses `3-15i+5j-k`-style literals.
pub fn quaternion(s: &str) -> Quaternion<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut c = [0.0; 4];
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1.0, &rest[1..]),
            b'+' => (1.0, &rest[1..]),
            _ => (1.0, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        let (num, axis) = match term.chars().last() {
            Some(u @ ('i' | 'j' | 'k')) => (&term[..term.len() - 1], " ijk".find(u).unwrap()),
            _ => (term, 0),
        };
        let v: f64 = if num.is_empty() { 1.0 } else { num.parse().unwrap_or_else(|_| panic!("bad literal {s}")) };
        c[axis] += sign * v;
        rest = &body[end..];
    }
    Quaternion::from_array(c)
}

/// Frontal slices by tensor name and column index.
type Slices = BTreeMap<String, BTreeMap<(usize, usize), Vec<Vec<Quaternion<f64>>>>>;

pub fn parse(text: &str) -> BTreeMap<String, QTensor<f64>> {
    let mut slices: Slices = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (lhs, rhs) = line.split_once('=').expect("slice line");
        let (name, idx) = lhs.trim().split_once("(:,:,").expect("slice index");
        let (a, b) = idx.trim_end_matches(')').split_once(',').expect("two column indices");
        let body = rhs.trim().trim_start_matches('[').trim_end_matches(']');
        let rows = body.split(';').map(|r| r.split(',').map(quaternion).collect()).collect();
        let key = (a.trim().parse::<usize>().unwrap() - 1, b.trim().parse::<usize>().unwrap() - 1);
        let prev = slices.entry(name.to_string()).or_default().insert(key, rows);
        assert!(prev.is_none(), "{name} slice {key:?} given twice");
    }
    slices
        .into_iter()
        .map(|(name, s)| {
            assert_eq!(s.len(), 4, "{name} needs four slices");
            let shape = Shape::square(&[2, 2]).unwrap();
            let t = QTensor::from_fn(shape, |r, c| s[&(c[0], c[1])][r[0]][r[1]]);
            (name, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(quaternion("0"), Quaternion::zero());
        assert_eq!(quaternion("-2j"), Quaternion::new(0.0, 0.0, -2.0, 0.0));
        assert_eq!(quaternion("3 - 15i+5j - k"), Quaternion::new(3.0, -15.0, 5.0, -1.0));
        assert_eq!(quaternion("-1+i"), Quaternion::new(-1.0, 1.0, 0.0, 0.0));
    }
}
