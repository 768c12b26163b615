use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{BinaryMask, Shape};

const STEP: f64 = 0.5;
const MAX_TURN: f64 = std::f64::consts::FRAC_PI_3;
const TAPER: f64 = 0.75;
const CHILD_ATTEMPTS: usize = 20;

struct Branch {
    points: Vec<Vec<f64>>,
    radii: Vec<f64>,
    directions: Vec<Vec<f64>>,
    length: f64,
}

/// A connected tree of tapered tubes grown from one root by a random
/// branching walk. Children start on an existing branch with a smaller
/// radius, so radius decreases with depth.
pub fn random_tree(dims: &[usize], n_branches: usize, radius_range: [f64; 2], seed: u64) -> Result<BinaryMask> {
    let shape = Shape::new(dims)?;
    let [rmin, rmax] = radius_range;
    if n_branches == 0 {
        return Err(Error::invalid("n_branches must be >= 1"));
    }
    if !(rmin >= 1.0 && rmax >= rmin) {
        return Err(Error::invalid("radius range must satisfy 1 <= min <= max"));
    }
    let smallest = *dims.iter().min().unwrap() as f64;
    if smallest < 2.0 * rmax + 6.0 {
        return Err(Error::invalid("grid too small for the requested radius"));
    }
    let ndim = dims.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Root: starts near one face and heads towards the opposite side.
    let axis = rng.random_range(0..ndim);
    let margin = rmax + 2.0;
    let mut start: Vec<f64> = dims
        .iter()
        .map(|&d| rng.random_range(0.3 * d as f64..=0.7 * d as f64))
        .collect();
    start[axis] = margin;
    let mut dir = vec![0.0; ndim];
    dir[axis] = 1.0;
    let dir = perturb(&dir, 0.3, &mut rng);
    let root = walk(&shape, start, dir, rmax, rmin, 0.8 * dims[axis] as f64, &mut rng);
    let mut branches = vec![root];

    for _ in 1..n_branches {
        for _ in 0..CHILD_ATTEMPTS {
            let parent = &branches[rng.random_range(0..branches.len())];
            let n = parent.points.len();
            if n < 8 {
                continue;
            }
            let at = rng.random_range(n / 5..n);
            let r0 = (parent.radii[at] * TAPER).max(rmin);
            let dir = branch_direction(&parent.directions[at], &mut rng);
            let length = (parent.length * 0.7).max(8.0);
            let child = walk(&shape, parent.points[at].clone(), dir, r0, rmin, length, &mut rng);
            if child.points.len() >= 8 {
                branches.push(child);
                break;
            }
        }
    }

    let mut mask = BinaryMask::empty(shape.clone());
    for b in &branches {
        for (p, &r) in b.points.iter().zip(&b.radii) {
            stamp(&mut mask, p, r);
        }
    }
    Ok(mask)
}

/// Steps along a slowly turning direction until `length` is covered or the
/// tube would leave the grid. The total turn stays within `MAX_TURN` of the
/// initial heading.
fn walk<R: Rng + ?Sized>(
    shape: &Shape,
    start: Vec<f64>,
    dir: Vec<f64>,
    r_start: f64,
    rmin: f64,
    length: f64,
    rng: &mut R,
) -> Branch {
    let steps = (length / STEP).ceil() as usize;
    let r_end = (r_start * TAPER).max(rmin);
    let heading = dir.clone();
    let mut b = Branch {
        points: vec![start.clone()],
        radii: vec![r_start],
        directions: vec![dir.clone()],
        length: 0.0,
    };
    let mut p = start;
    let mut d = dir;
    for k in 1..=steps {
        let mut next = perturb(&d, 0.04, rng);
        if dot(&next, &heading) < MAX_TURN.cos() {
            next = d.clone();
        }
        let r = r_start + (r_end - r_start) * k as f64 / steps as f64;
        let q: Vec<f64> = p.iter().zip(&next).map(|(a, b)| a + STEP * b).collect();
        let inside = q
            .iter()
            .zip(shape.dims())
            .all(|(&x, &n)| x >= r + 1.0 && x <= n as f64 - 2.0 - r);
        if !inside {
            break;
        }
        p = q;
        d = next;
        b.points.push(p.clone());
        b.radii.push(r);
        b.directions.push(d.clone());
        b.length += STEP;
    }
    b
}

/// Child heading: the parent heading turned by 30 to 70 degrees.
fn branch_direction<R: Rng + ?Sized>(parent: &[f64], rng: &mut R) -> Vec<f64> {
    let angle = rng.random_range(30f64.to_radians()..70f64.to_radians());
    // Unit vector orthogonal to the parent heading.
    let mut ortho: Vec<f64> = if parent.len() == 2 {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        vec![-parent[1] * sign, parent[0] * sign]
    } else {
        loop {
            let v: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let along = dot(&v, parent);
            let w: Vec<f64> = v.iter().zip(parent).map(|(a, b)| a - along * b).collect();
            if norm(&w) > 1e-3 {
                break w;
            }
        }
    };
    let n = norm(&ortho);
    ortho.iter_mut().for_each(|x| *x /= n);
    parent
        .iter()
        .zip(&ortho)
        .map(|(a, b)| a * angle.cos() + b * angle.sin())
        .collect()
}

fn perturb<R: Rng + ?Sized>(d: &[f64], amount: f64, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = d.iter().map(|x| x + rng.random_range(-amount..=amount)).collect();
    let n = norm(&v);
    v.iter().map(|x| x / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn stamp(mask: &mut BinaryMask, centre: &[f64], radius: f64) {
    let shape = mask.shape().clone();
    let dims = shape.dims();
    let lo: Vec<usize> = centre.iter().map(|&c| (c - radius).floor().max(0.0) as usize).collect();
    let hi: Vec<usize> = centre
        .iter()
        .zip(dims)
        .map(|(&c, &n)| ((c + radius).ceil() as usize).min(n - 1))
        .collect();
    let r2 = radius * radius;
    let mut c = lo.clone();
    loop {
        let d2: f64 = c.iter().zip(centre).map(|(&x, &p)| (x as f64 - p).powi(2)).sum();
        if d2 <= r2 {
            mask.values_mut()[shape.index(&c)] = true;
        }
        let mut a = c.len();
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            if c[a] < hi[a] {
                c[a] += 1;
                break;
            }
            c[a] = lo[a];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::betti;

    #[test]
    fn single_branch_is_a_simple_tube() {
        for seed in 0..20 {
            let m = random_tree(&[96, 96], 1, [1.0, 3.0], seed).unwrap();
            let b = betti(&m);
            assert_eq!((b.b0, b.b1), (1, 0), "seed {seed}");
        }
    }

    #[test]
    fn trees_are_connected() {
        for seed in 0..20 {
            let m = random_tree(&[128, 128], 8, [1.0, 4.0], seed).unwrap();
            assert_eq!(betti(&m).b0, 1, "seed {seed}");
            let v = random_tree(&[40, 40, 40], 4, [1.0, 2.5], seed).unwrap();
            assert_eq!(betti(&v).b0, 1, "3D seed {seed}");
        }
    }

    #[test]
    fn seeds_differ() {
        let a = random_tree(&[64, 64], 4, [1.0, 3.0], 1).unwrap();
        let b = random_tree(&[64, 64], 4, [1.0, 3.0], 2).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, random_tree(&[64, 64], 4, [1.0, 3.0], 1).unwrap());
    }

    #[test]
    fn stamp_matches_disc() {
        let mut m = BinaryMask::empty(Shape::new(&[9, 9]).unwrap());
        stamp(&mut m, &[4.0, 4.0], 2.0);
        assert_eq!(m.count(), 13);
    }

    #[test]
    fn invalid_arguments() {
        assert!(random_tree(&[64, 64], 0, [1.0, 2.0], 0).is_err());
        assert!(random_tree(&[64, 64], 2, [0.5, 2.0], 0).is_err());
        assert!(random_tree(&[8, 8], 2, [1.0, 4.0], 0).is_err());
    }
}
