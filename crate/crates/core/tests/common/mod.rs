#![allow(dead_code)]

use superpot::catalog::{builtin_toric_fano, TORIC_SYMBOLS};
use superpot::{DivisorClass, Fan, ToricVariety};

pub fn builtins() -> Vec<(&'static str, ToricVariety)> {
    TORIC_SYMBOLS
        .iter()
        .map(|(s, _)| (*s, ToricVariety::new(builtin_toric_fano(s).unwrap()).unwrap()))
        .collect()
}

pub fn variety(symbol: &str) -> ToricVariety {
    ToricVariety::new(builtin_toric_fano(symbol).unwrap()).unwrap()
}

pub fn p3() -> ToricVariety {
    ToricVariety::new(Fan::projective_space(3)).unwrap()
}

pub fn p1_cubed() -> ToricVariety {
    let p1 = Fan::projective_space(1);
    ToricVariety::new(p1.product(&p1).product(&p1)).unwrap()
}

pub fn blown_up_p3() -> ToricVariety {
    ToricVariety::new(Fan::projective_space(3).star_subdivide(&[0, 1, 2]).unwrap()).unwrap()
}

/// `P¹ × F_n`; the negative section of `F_n` is ray 1.
pub fn p1_times_hirzebruch(n: i64) -> ToricVariety {
    ToricVariety::new(Fan::hirzebruch(n).product(&Fan::projective_space(1))).unwrap()
}

/// Lattice points of `{m : <m, v_ρ> >= −a_ρ}` by brute force over a box.
/// The box is large enough for every polytope exercised by the tests.
pub fn sections_by_lattice_points(v: &ToricVariety, l: &DivisorClass, radius: i64) -> i64 {
    let d = v.dim();
    let mut count = 0;
    let mut m = vec![-radius; d];
    loop {
        let inside = (0..v.ray_count()).all(|i| {
            let dot: i64 = v.ray(i).0.iter().zip(&m).map(|(a, b)| a * b).sum();
            dot >= -l.coeffs[i]
        });
        if inside {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == d {
                return count;
            }
            m[k] += 1;
            if m[k] <= radius {
                break;
            }
            m[k] = -radius;
            k += 1;
        }
    }
}

pub fn alternating(h: &[i64]) -> i64 {
    h.iter().enumerate().map(|(i, x)| if i % 2 == 0 { *x } else { -x }).sum()
}
