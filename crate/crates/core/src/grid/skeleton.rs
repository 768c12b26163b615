//! Topology-preserving thinning by directional sequential deletion of simple
//! border points. Foreground uses full connectivity (8/26), background face
//! connectivity (4/6). Endpoints are kept, so 3D results are curve skeletons.

use std::sync::OnceLock;

use super::BinaryMask;

pub fn skeletonize(mask: &BinaryMask) -> BinaryMask {
    let mut out = mask.clone();
    let shape = mask.shape().clone();
    let ndim = shape.ndim();
    let cube = cube_offsets(ndim);
    let directions: Vec<usize> = (0..cube.len())
        .filter(|&k| cube[k].iter().filter(|&&o| o != 0).count() == 1)
        .collect();

    let mut alive: Vec<usize> = out.foreground().collect();
    let mut coord = vec![0isize; ndim];
    let mut candidates = Vec::new();
    loop {
        let mut changed = false;
        for &dir in &directions {
            candidates.clear();
            for &i in &alive {
                if !out.values()[i] {
                    continue;
                }
                let c = shape.coords(i);
                for a in 0..ndim {
                    coord[a] = c[a] as isize + cube[dir][a];
                }
                let border = shape
                    .checked_index(&coord)
                    .is_none_or(|j| !out.values()[j]);
                if !border {
                    continue;
                }
                let nb = neighbourhood(&out, &c, &cube, &mut coord);
                if !is_endpoint(nb) && is_simple(nb, ndim) {
                    candidates.push(i);
                }
            }
            for &i in &candidates {
                let c = shape.coords(i);
                let nb = neighbourhood(&out, &c, &cube, &mut coord);
                if !is_endpoint(nb) && is_simple(nb, ndim) {
                    out.values_mut()[i] = false;
                    changed = true;
                }
            }
        }
        alive.retain(|&i| out.values()[i]);
        if !changed {
            return out;
        }
    }
}

/// All 3^n offsets in row-major order; index 3^n / 2 is the centre.
fn cube_offsets(ndim: usize) -> Vec<Vec<isize>> {
    let total = 3usize.pow(ndim as u32);
    (0..total)
        .map(|k| {
            let mut off = vec![0isize; ndim];
            let mut r = k;
            for a in (0..ndim).rev() {
                off[a] = (r % 3) as isize - 1;
                r /= 3;
            }
            off
        })
        .collect()
}

/// Bit k set iff the k-th cube cell is foreground (out-of-grid is background).
fn neighbourhood(mask: &BinaryMask, c: &[usize], cube: &[Vec<isize>], coord: &mut [isize]) -> u32 {
    let shape = mask.shape();
    let mut bits = 0u32;
    for (k, off) in cube.iter().enumerate() {
        for a in 0..c.len() {
            coord[a] = c[a] as isize + off[a];
        }
        if shape.checked_index(coord).is_some_and(|j| mask.values()[j]) {
            bits |= 1 << k;
        }
    }
    bits
}

fn is_endpoint(nb: u32) -> bool {
    let centre = nb.count_ones() as usize;
    // The centre bit is included in `nb`; an endpoint has exactly one neighbour.
    centre == 2
}

fn is_simple(nb: u32, ndim: usize) -> bool {
    if ndim == 2 {
        simple_lut_2d()[pack_2d(nb) as usize]
    } else {
        simple_point(nb, 3)
    }
}

fn pack_2d(nb: u32) -> u32 {
    // Drop the centre bit (index 4) to get an 8-bit key.
    (nb & 0b1111) | ((nb >> 5) << 4)
}

fn simple_lut_2d() -> &'static [bool; 256] {
    static LUT: OnceLock<[bool; 256]> = OnceLock::new();
    LUT.get_or_init(|| {
        let mut lut = [false; 256];
        for (key, slot) in lut.iter_mut().enumerate() {
            let key = key as u32;
            let nb = (key & 0b1111) | (1 << 4) | ((key >> 4) << 5);
            *slot = simple_point(nb, 2);
        }
        lut
    })
}

struct CubeTables {
    order: Vec<usize>,
    full_adj: Vec<Vec<usize>>,
    face_adj: Vec<Vec<usize>>,
}

fn cube_tables(ndim: usize) -> &'static CubeTables {
    static TABLES: [OnceLock<CubeTables>; 2] = [OnceLock::new(), OnceLock::new()];
    TABLES[ndim - 2].get_or_init(|| {
        let cube = cube_offsets(ndim);
        let n = cube.len();
        let order = cube
            .iter()
            .map(|o| o.iter().filter(|&&x| x != 0).count())
            .collect();
        let mut full_adj = vec![Vec::new(); n];
        let mut face_adj = vec![Vec::new(); n];
        for a in 0..n {
            for b in 0..n {
                let d: Vec<isize> = cube[a].iter().zip(&cube[b]).map(|(x, y)| x - y).collect();
                if a == b || d.iter().any(|x| x.abs() > 1) {
                    continue;
                }
                full_adj[a].push(b);
                if d.iter().filter(|&&x| x != 0).count() == 1 {
                    face_adj[a].push(b);
                }
            }
        }
        CubeTables {
            order,
            full_adj,
            face_adj,
        }
    })
}

/// Simple-point characterisation for the (full, face) connectivity pair: the
/// foreground punctured neighbourhood has one full-connected component, and
/// exactly one face-connected background component of the punctured
/// (18-)neighbourhood is face-adjacent to the centre.
fn simple_point(nb: u32, ndim: usize) -> bool {
    let t = cube_tables(ndim);
    let n = t.order.len();
    let centre = n / 2;
    let fg = |k: usize| k != centre && nb & (1 << k) != 0;

    let fg_count = (0..n).filter(|&k| fg(k)).count();
    if fg_count == 0 {
        return false;
    }
    // One full-connected foreground component.
    let start = (0..n).find(|&k| fg(k)).unwrap();
    if flood(start, |k| fg(k), &t.full_adj) != fg_count {
        return false;
    }

    // Face-connected background components of N18* (N8* in 2D) touching a
    // face neighbour of the centre.
    let in_bg = |k: usize| k != centre && !fg(k) && t.order[k] <= 2;
    let mut seen = 0u32;
    let mut components = 0;
    for k in 0..n {
        if t.order[k] != 1 || !in_bg(k) || seen & (1 << k) != 0 {
            continue;
        }
        components += 1;
        if components > 1 {
            return false;
        }
        let mut stack = vec![k];
        seen |= 1 << k;
        while let Some(i) = stack.pop() {
            for &j in &t.face_adj[i] {
                if in_bg(j) && seen & (1 << j) == 0 {
                    seen |= 1 << j;
                    stack.push(j);
                }
            }
        }
    }
    components == 1
}

fn flood(start: usize, member: impl Fn(usize) -> bool, adj: &[Vec<usize>]) -> usize {
    let mut seen = 1u32 << start;
    let mut stack = vec![start];
    let mut count = 1;
    while let Some(i) = stack.pop() {
        for &j in &adj[i] {
            if member(j) && seen & (1 << j) == 0 {
                seen |= 1 << j;
                count += 1;
                stack.push(j);
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{connected_components, Connectivity, Shape};

    fn shape(d: &[usize]) -> Shape {
        Shape::new(d).unwrap()
    }

    #[test]
    fn empty_stays_empty() {
        let m = BinaryMask::empty(shape(&[10, 10]));
        assert_eq!(skeletonize(&m), m);
    }

    #[test]
    fn bar_thins_to_one_cell_line() {
        let m = BinaryMask::from_fn(shape(&[9, 30]), |c| (3..=5).contains(&c[0]) && (4..=25).contains(&c[1]));
        let s = skeletonize(&m);
        assert!(s.is_subset_of(&m));
        let mut min_col = usize::MAX;
        let mut max_col = 0;
        for x in 0..30 {
            let count = (0..9).filter(|&y| s.get(&[y, x])).count();
            assert!(count <= 1, "column {x} has {count} cells");
            if count == 1 {
                min_col = min_col.min(x);
                max_col = max_col.max(x);
            }
        }
        assert!(min_col.abs_diff(4) <= 1 && max_col.abs_diff(25) <= 1, "{min_col}..{max_col}");
    }

    #[test]
    fn simple_point_lut_basics() {
        // Isolated point and interior point are not simple.
        assert!(!simple_point(1 << 4, 2));
        assert!(!simple_point(0x1ff, 2));
        // A corner of a filled block is simple.
        let nb = (1 << 4) | (1 << 5) | (1 << 7) | (1 << 8);
        assert!(simple_point(nb, 2));
        // Middle of a horizontal line: removal splits it.
        let nb = (1 << 3) | (1 << 4) | (1 << 5);
        assert!(!simple_point(nb, 2));
    }

    #[test]
    fn simple_point_3d_basics() {
        let centre = 13;
        assert!(!simple_point(1 << centre, 3));
        assert!(!simple_point((1 << 27) - 1, 3));
        // Tip of a straight line.
        assert!(simple_point((1 << centre) | (1 << 14), 3));
        // Middle of a line.
        assert!(!simple_point((1 << centre) | (1 << 14) | (1 << 12), 3));
    }

    #[test]
    fn annulus_keeps_its_loop() {
        let m = BinaryMask::from_fn(shape(&[30, 30]), |c| {
            let r2 = (c[0] as f64 - 15.0).powi(2) + (c[1] as f64 - 15.0).powi(2);
            (36.0..=100.0).contains(&r2)
        });
        let s = skeletonize(&m);
        assert!(s.is_subset_of(&m));
        assert_eq!(connected_components(&s, Connectivity::Full).count(), 1);
        // The hole survives: the centre stays in a bounded background region.
        let bg = connected_components(&s.complement(), Connectivity::Face);
        assert_eq!(bg.count(), 2);
    }

    #[test]
    fn solid_cube_thins_to_small_connected_set() {
        let m = BinaryMask::from_fn(shape(&[9, 9, 9]), |c| c.iter().all(|&x| (2..=6).contains(&x)));
        let s = skeletonize(&m);
        assert!(!s.is_empty());
        assert!(s.count() <= 5);
        assert_eq!(connected_components(&s, Connectivity::Full).count(), 1);
    }

    #[test]
    fn tube_3d_becomes_curve() {
        let m = BinaryMask::from_fn(shape(&[7, 7, 20]), |c| {
            let r2 = (c[0] as f64 - 3.0).powi(2) + (c[1] as f64 - 3.0).powi(2);
            r2 <= 4.0 && (2..18).contains(&c[2])
        });
        let s = skeletonize(&m);
        assert_eq!(connected_components(&s, Connectivity::Full).count(), 1);
        for z in 0..20 {
            let count = (0..49).filter(|&k| s.get(&[k / 7, k % 7, z])).count();
            assert!(count <= 1, "slice {z} has {count} voxels");
        }
        assert!(s.count() >= 12);
    }
}
