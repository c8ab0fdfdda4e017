use std::collections::HashMap;

use super::{ScalarField, SimplicialComplex};
use crate::error::{Error, Result};

/// Refines a complex of dimension at most 2 so that every level in `levels`
/// passes only through vertices and full edges. Each edge strictly crossing
/// a level gets a new vertex carrying exactly that level value; triangles
/// are split accordingly.
pub fn subdivide_at_levels(
    x: &SimplicialComplex,
    f: &ScalarField,
    levels: &[f64],
) -> Result<(SimplicialComplex, ScalarField)> {
    f.check_len(x)?;
    if x.dim().unwrap_or(0) > 2 {
        return Err(Error::invalid("level subdivision supports dimension <= 2 only"));
    }
    let mut complex = x.clone();
    let mut values = f.values().to_vec();
    let mut sorted: Vec<f64> = levels.iter().copied().filter(|c| c.is_finite()).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    for c in sorted {
        let (next, next_values) = split_once(&complex, values, c)?;
        complex = next;
        values = next_values;
    }
    Ok((complex, ScalarField::new(values)?))
}

fn split_once(
    x: &SimplicialComplex,
    mut values: Vec<f64>,
    level: f64,
) -> Result<(SimplicialComplex, Vec<f64>)> {
    let mut coords = x.all_coords().to_vec();
    let mut mid: HashMap<[usize; 2], usize> = HashMap::new();
    for &[a, b] in x.edges() {
        let (fa, fb) = (values[a], values[b]);
        if (fa < level && level < fb) || (fb < level && level < fa) {
            let s = (level - fa) / (fb - fa);
            let p = coords[a]
                .iter()
                .zip(&coords[b])
                .map(|(u, v)| u + s * (v - u))
                .collect();
            coords.push(p);
            values.push(level);
            mid.insert([a, b], coords.len() - 1);
        }
    }
    if mid.is_empty() {
        return Ok((x.clone(), values));
    }
    let split = |a: usize, b: usize| mid.get(&[a.min(b), a.max(b)]).copied();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for s in x.maximal_simplices() {
        match s.len() {
            1 => out.push(s),
            2 => match split(s[0], s[1]) {
                Some(m) => {
                    out.push(vec![s[0], m]);
                    out.push(vec![m, s[1]]);
                }
                None => out.push(s),
            },
            _ => {
                let [p, q, r] = [s[0], s[1], s[2]];
                let crossings = [(p, q, r), (q, r, p), (p, r, q)]
                    .into_iter()
                    .filter_map(|(a, b, other)| split(a, b).map(|m| (a, b, other, m)))
                    .collect::<Vec<_>>();
                match crossings.as_slice() {
                    [] => out.push(s),
                    [(a, b, w, m)] => {
                        out.push(vec![*w, *a, *m]);
                        out.push(vec![*w, *m, *b]);
                    }
                    [(a1, b1, _, m1), (a2, b2, _, m2)] => {
                        let lone = if a1 == a2 || a1 == b2 { *a1 } else { *b1 };
                        let far1 = if *a1 == lone { *b1 } else { *a1 };
                        let far2 = if *a2 == lone { *b2 } else { *a2 };
                        out.push(vec![lone, *m1, *m2]);
                        out.push(vec![*m1, far1, far2]);
                        out.push(vec![*m1, far2, *m2]);
                    }
                    _ => unreachable!("a level crosses at most two edges of a triangle"),
                }
            }
        }
    }
    Ok((SimplicialComplex::from_simplices(coords, out)?, values))
}
