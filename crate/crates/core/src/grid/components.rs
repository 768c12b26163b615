use std::collections::VecDeque;

use super::{neighbour_offsets, BinaryMask, LabelField};

/// Cell adjacency: `Face` is 4 (2D) / 6 (3D), `Full` is 8 / 26.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    Face,
    #[default]
    Full,
}

/// Labels maximal connected foreground regions 1..=K in the order their first
/// cell appears in a row-major scan.
pub fn connected_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelField {
    let shape = mask.shape();
    let offsets = neighbour_offsets(shape.ndim(), connectivity);
    let values = mask.values();
    let mut labels = vec![0u32; values.len()];
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    let mut coord = vec![0isize; shape.ndim()];
    for start in 0..values.len() {
        if !values[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(cell) = queue.pop_front() {
            let c = shape.coords(cell);
            for off in &offsets {
                for (a, o) in off.iter().enumerate() {
                    coord[a] = c[a] as isize + o;
                }
                if let Some(j) = shape.checked_index(&coord) {
                    if values[j] && labels[j] == 0 {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    LabelField::new(shape.clone(), labels, next)
}

/// Drops foreground components with fewer than `min_size` cells.
pub(crate) fn remove_small_components(
    mask: &BinaryMask,
    min_size: usize,
    connectivity: Connectivity,
) -> BinaryMask {
    if min_size == 0 {
        return mask.clone();
    }
    let labels = connected_components(mask, connectivity);
    let sizes = labels.sizes();
    let keep: Vec<bool> = labels
        .labels()
        .iter()
        .map(|&l| l != 0 && sizes[l as usize] >= min_size)
        .collect();
    BinaryMask::from_vec(mask.shape().clone(), keep).expect("length matches shape")
}

/// Labels of background components that touch the grid border.
pub(crate) fn border_labels(labels: &LabelField) -> Vec<bool> {
    let shape = labels.shape();
    let mut touches = vec![false; labels.count() + 1];
    for (i, &l) in labels.labels().iter().enumerate() {
        if l == 0 || touches[l as usize] {
            continue;
        }
        let c = shape.coords(i);
        if c.iter().zip(shape.dims()).any(|(&x, &d)| x == 0 || x + 1 == d) {
            touches[l as usize] = true;
        }
    }
    touches
}

/// Fills enclosed background regions (face-connected, not touching the
/// border) with fewer than `max_size` cells.
pub(crate) fn fill_small_holes(mask: &BinaryMask, max_size: usize) -> BinaryMask {
    let bg = connected_components(&mask.complement(), Connectivity::Face);
    let sizes = bg.sizes();
    let border = border_labels(&bg);
    let filled: Vec<bool> = mask
        .values()
        .iter()
        .zip(bg.labels())
        .map(|(&fg, &l)| fg || (l != 0 && !border[l as usize] && sizes[l as usize] < max_size))
        .collect();
    BinaryMask::from_vec(mask.shape().clone(), filled).expect("length matches shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diagonal_pair() -> BinaryMask {
        let mut m = BinaryMask::empty(Shape::new(&[3, 3]).unwrap());
        m.set(&[0, 0], true);
        m.set(&[1, 1], true);
        m
    }

    #[test]
    fn diagonal_cells_depend_on_connectivity() {
        let m = diagonal_pair();
        assert_eq!(connected_components(&m, Connectivity::Full).count(), 1);
        assert_eq!(connected_components(&m, Connectivity::Face).count(), 2);
    }

    /// Recursive flood fill over explicit neighbour enumeration.
    fn flood_fill_partition(m: &BinaryMask, full: bool) -> Vec<u32> {
        let shape = m.shape();
        let dims = shape.dims().to_vec();
        let mut labels = vec![0u32; shape.len()];
        let mut next = 0;
        fn visit(
            y: isize,
            x: isize,
            dims: &[usize],
            m: &BinaryMask,
            labels: &mut [u32],
            label: u32,
            full: bool,
        ) {
            if y < 0 || x < 0 || y >= dims[0] as isize || x >= dims[1] as isize {
                return;
            }
            let i = y as usize * dims[1] + x as usize;
            if !m.values()[i] || labels[i] != 0 {
                return;
            }
            labels[i] = label;
            for dy in -1..=1isize {
                for dx in -1..=1isize {
                    if (dy, dx) == (0, 0) || (!full && dy != 0 && dx != 0) {
                        continue;
                    }
                    visit(y + dy, x + dx, dims, m, labels, label, full);
                }
            }
        }
        for y in 0..dims[0] {
            for x in 0..dims[1] {
                let i = y * dims[1] + x;
                if m.values()[i] && labels[i] == 0 {
                    next += 1;
                    visit(y as isize, x as isize, &dims, m, &mut labels, next, full);
                }
            }
        }
        labels
    }

    #[test]
    fn random_masks_match_flood_fill() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let m = BinaryMask::from_fn(Shape::new(&[16, 16]).unwrap(), |_| rng.random_bool(0.45));
            for (conn, full) in [(Connectivity::Full, true), (Connectivity::Face, false)] {
                let ours = connected_components(&m, conn);
                // Both label in raster order of first cell, so labels agree exactly.
                assert_eq!(ours.labels(), flood_fill_partition(&m, full).as_slice());
            }
        }
    }

    #[test]
    fn small_components_and_holes() {
        let shape = Shape::new(&[10, 10]).unwrap();
        let mut m = BinaryMask::from_fn(shape, |c| {
            (2..=6).contains(&c[0]) && (2..=6).contains(&c[1])
        });
        m.set(&[4, 4], false);
        m.set(&[9, 9], true);
        let cleaned = remove_small_components(&m, 2, Connectivity::Full);
        assert!(!cleaned.get(&[9, 9]));
        let filled = fill_small_holes(&cleaned, 10);
        assert!(filled.get(&[4, 4]));
        assert_eq!(filled.count(), 25);
    }
}
