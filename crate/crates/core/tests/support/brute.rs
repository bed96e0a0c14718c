//! Exhaustive path enumeration over every step sequence of a fixed length.
//! Events observed at time `k <= n` are summed over all length-`n` paths,
//! whose extensions carry total probability one.

#![allow(dead_code)]

use std::collections::BTreeMap;

#[derive(Default, Clone, Copy)]
pub struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn get(&self) -> f64 {
        self.sum
    }
}

pub type Table = BTreeMap<i64, Kahan>;

pub fn get(t: &Table, k: i64) -> f64 {
    t.get(&k).map_or(0.0, Kahan::get)
}

/// Calls `visit(steps, probability)` for each of the `atoms.len()^n` paths.
pub fn for_each_path(atoms: &[(i64, f64)], n: usize, mut visit: impl FnMut(&[i64], f64)) {
    fn walk(atoms: &[(i64, f64)], n: usize, steps: &mut Vec<i64>, p: f64, visit: &mut dyn FnMut(&[i64], f64)) {
        if steps.len() == n {
            visit(steps, p);
            return;
        }
        for &(k, q) in atoms {
            steps.push(k);
            walk(atoms, n, steps, p * q, visit);
            steps.pop();
        }
    }
    walk(atoms, n, &mut Vec::with_capacity(n), 1.0, &mut visit);
}

/// `out[k][z] = P[tau(x) > k, x + S(k) = z]`.
pub fn survival(atoms: &[(i64, f64)], x: i64, n: usize) -> Vec<Table> {
    let mut out = vec![Table::new(); n + 1];
    for_each_path(atoms, n, |steps, p| {
        let mut pos = x;
        out[0].entry(pos).or_default().add(p);
        for (k, &s) in steps.iter().enumerate() {
            pos += s;
            if pos < 0 {
                return;
            }
            out[k + 1].entry(pos).or_default().add(p);
        }
    });
    out
}

/// `out[k] = P[tau(x) = k]`, `out[0] = 0`.
pub fn tau(atoms: &[(i64, f64)], x: i64, n: usize) -> Vec<f64> {
    let mut out = vec![Kahan::default(); n + 1];
    for_each_path(atoms, n, |steps, p| {
        let mut pos = x;
        for (k, &s) in steps.iter().enumerate() {
            pos += s;
            if pos < 0 {
                out[k + 1].add(p);
                return;
            }
        }
    });
    out.iter().map(Kahan::get).collect()
}

/// Reflected-walk epochs from `x`: `first[k][y] = P[r_1 = k, X(k) = y]`
/// and `all[k][y] = sum_l P[r_l = k, X(k) = y]`.
pub fn reflections(atoms: &[(i64, f64)], x: i64, n: usize) -> (Vec<Table>, Vec<Table>) {
    let mut first = vec![Table::new(); n + 1];
    let mut all = vec![Table::new(); n + 1];
    for_each_path(atoms, n, |steps, p| {
        let mut pos = x;
        let mut seen = false;
        for (k, &s) in steps.iter().enumerate() {
            let next = pos + s;
            pos = next.abs();
            if next < 0 {
                all[k + 1].entry(pos).or_default().add(p);
                if !seen {
                    first[k + 1].entry(pos).or_default().add(p);
                    seen = true;
                }
            }
        }
    });
    (first, all)
}

/// `E[phi((x + S(n)) / scale) | tau(x) > n]`.
pub fn meander(atoms: &[(i64, f64)], x: i64, n: usize, scale: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let (mut num, mut den) = (Kahan::default(), Kahan::default());
    for_each_path(atoms, n, |steps, p| {
        let mut pos = x;
        for &s in steps {
            pos += s;
            if pos < 0 {
                return;
            }
        }
        num.add(p * phi(pos as f64 / scale));
        den.add(p);
    });
    num.get() / den.get()
}

/// `E[phi((x + S(mid)) / scale) | tau(x) > end, x + S(end) = y]`.
pub fn bridge(
    atoms: &[(i64, f64)],
    x: i64,
    y: i64,
    mid: usize,
    end: usize,
    scale: f64,
    phi: impl Fn(f64) -> f64,
) -> Option<f64> {
    let (mut num, mut den) = (Kahan::default(), Kahan::default());
    for_each_path(atoms, end, |steps, p| {
        let mut pos = x;
        let mut at_mid = x;
        for (k, &s) in steps.iter().enumerate() {
            pos += s;
            if pos < 0 {
                return;
            }
            if k + 1 == mid {
                at_mid = pos;
            }
        }
        if pos == y {
            num.add(p * phi(at_mid as f64 / scale));
            den.add(p);
        }
    });
    (den.get() > 0.0).then(|| num.get() / den.get())
}
