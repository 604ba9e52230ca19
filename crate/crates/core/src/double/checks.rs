//! Exhaustive checks of the set identities and schedule properties the
//! zig-zag decoder depends on. Each function returns the list of violations.

use super::{build_sets, make_schedule, modn};
use crate::error::Result;
use crate::graph::{failure_edges, EdgeId, EdgeSet};

fn expect(out: &mut Vec<String>, got: &EdgeSet, want: &[EdgeId], what: String) {
    let want: EdgeSet = want.iter().copied().collect();
    if got != &want {
        out.push(format!(
            "{what}: got {:?}, want {:?}",
            got.iter().collect::<Vec<_>>(),
            want.iter().collect::<Vec<_>>()
        ));
    }
}

/// Intersection identities between the `S`, `D` and failure sets.
pub fn set_identity_violations(n: usize) -> Result<Vec<String>> {
    let fam = build_sets(n)?;
    let f = |nodes: &[usize]| failure_edges(n, nodes).expect("nodes in range");
    let e = EdgeId::new;
    let mut out = Vec::new();
    for m in 0..n - 1 {
        if fam.s(m).len() != n - 1 {
            out.push(format!("|S_{m}| = {}", fam.s(m).len()));
        }
    }
    for m in 0..n {
        if fam.d(m).len() != n.div_ceil(2) {
            out.push(format!("|D_{m}| = {}", fam.d(m).len()));
        }
    }
    let small = n - 2;
    for i in 0..small {
        let fi = f(&[i]);
        // (c)
        for s in (0..n).filter(|&s| s != modn(i as i64 - 2, n)) {
            let got = fam.d(s).intersection(&fi);
            expect(&mut out, &got, &[e(modn(s as i64 - i as i64, n), i)], format!("(c) i={i} s={s}"));
        }
        for j in (0..small).filter(|&j| j != i) {
            let fij = f(&[i, j]);
            // (a)
            for h in (0..small).filter(|&h| h != i && h != j) {
                let got = fam.s(h).intersection(&fij);
                expect(&mut out, &got, &[e(h, i), e(h, j)], format!("(a) h={h} i={i} j={j}"));
            }
            // (b)
            let got = fam.s(n - 2).intersection(&fij);
            expect(&mut out, &got, &[e(i, i), e(j, j)], format!("(b) i={i} j={j}"));
            // (d)
            let got = fam.d(modn(j as i64 - 2, n)).intersection(&fij);
            let k = modn(j as i64 - i as i64 - 2, n);
            expect(&mut out, &got, &[e(k, i)], format!("(d) i={i} j={j}"));
            // (e)
            let got = fam.d((i + j) % n).intersection(&fij);
            expect(&mut out, &got, &[e(i, j)], format!("(e) i={i} j={j}"));
        }
    }
    Ok(out)
}

/// Properties of the loop schedule for every failed pair in `[n-2]`.
pub fn schedule_violations(n: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for i in 0..n - 2 {
        for j in i + 1..n - 2 {
            let s = make_schedule(n, i, j)?;
            let tag = format!("i={i} j={j}");
            if s.x == s.y || s.x + s.y != n - 2 {
                out.push(format!("(a) {tag}: x={} y={}", s.x, s.y));
            }
            if s.first[s.x].0 != n - 1 || s.second[s.y].0 != n - 1 {
                out.push(format!("(b) {tag}: loops end at {} and {}", s.first[s.x].0, s.second[s.y].0));
            }
            let (a, b) = (s.visits_first(), s.visits_second());
            let in_a = a.contains(&i) && a.contains(&j);
            let in_b = b.contains(&i) && b.contains(&j);
            if in_a == in_b {
                out.push(format!("(c) {tag}: in A {in_a}, in B {in_b}"));
            }
            if a.contains(&(n - 2)) || b.contains(&(n - 2)) {
                out.push(format!("(d) {tag}: n-2 visited"));
            }
            let meet: Vec<_> = a.intersection(&b).copied().collect();
            if a.len() != s.x + 1 || b.len() != s.y + 1 || meet != [n - 1] {
                out.push(format!("(e) {tag}: |A|={} |B|={} A∩B={meet:?}", a.len(), b.len()));
            }
        }
    }
    Ok(out)
}
