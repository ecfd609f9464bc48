//! Orthonormal reference transform: orthogonality, energy preservation, and
//! the truncation-error identity.

use wavecast::channel::SplitMix64;
use wavecast::grid::Grid;
use wavecast::haar::oracle::{self, energy, haar_matrix};
use wavecast::haar::{subband_order, subband_rect};

fn random_grid(rng: &mut SplitMix64, w: usize, h: usize) -> Grid<f64> {
    Grid::from_fn(w, h, |_, _| rng.next_f64() * 510.0 - 255.0)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn haar_matrix_is_orthogonal() {
    for (n, levels) in [(8, 3), (16, 3), (64, 3), (32, 5), (6, 1)] {
        let h = haar_matrix(n, levels).unwrap();
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = h.row(i).iter().zip(h.row(j)).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() <= 1e-9, "n={n} ({i},{j}) = {dot}");
            }
        }
    }
}

#[test]
fn matrix_agrees_with_separable_transform() {
    // Y = H X H^T for the 1-level square case
    let mut rng = SplitMix64::new(5);
    let x = random_grid(&mut rng, 8, 8);
    let h = haar_matrix(8, 1).unwrap();
    let y = oracle::oracle_forward_normalized(&x).unwrap();
    for i in 0..8 {
        for j in 0..8 {
            let mut v = 0.0;
            for a in 0..8 {
                for b in 0..8 {
                    v += h.get(a, i) * x.get(b, a) * h.get(b, j);
                }
            }
            assert!((v - y.get(j, i)).abs() < 1e-9);
        }
    }
}

#[test]
fn energy_is_preserved_on_random_grids() {
    let mut rng = SplitMix64::new(0xE4E);
    for _ in 0..100 {
        let g = random_grid(&mut rng, 64, 64);
        let single = oracle::oracle_forward_normalized(&g).unwrap();
        assert!(rel_close(energy(&single), energy(&g), 1e-9));
        let multi = oracle::forward_multilevel(&g, 3).unwrap();
        assert!(rel_close(energy(&multi), energy(&g), 1e-9));
        let back = oracle::inverse_multilevel(&multi, 3).unwrap();
        let err: f64 = back
            .as_slice()
            .iter()
            .zip(g.as_slice())
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        assert!(err <= 1e-18 * energy(&g));
    }
}

#[test]
fn truncation_error_equals_dropped_energy() {
    let mut rng = SplitMix64::new(77);
    for _ in 0..10 {
        let g = random_grid(&mut rng, 32, 32);
        let coeffs = oracle::forward_multilevel(&g, 3).unwrap();
        let order = subband_order(3);
        // every single subband, plus a few multi-subband sets
        let mut sets: Vec<Vec<usize>> = (0..order.len()).map(|i| vec![i]).collect();
        sets.push(vec![1, 2, 3]);
        sets.push((4..10).collect());
        sets.push((1..10).collect());
        for set in sets {
            let mut t = coeffs.clone();
            let mut dropped = 0.0;
            for &i in &set {
                let (x0, y0, side) = subband_rect(32, order[i]);
                for y in y0..y0 + side {
                    for x in x0..x0 + side {
                        dropped += t.get(x, y).powi(2);
                        t.set(x, y, 0.0);
                    }
                }
            }
            let rec = oracle::inverse_multilevel(&t, 3).unwrap();
            let err: f64 = rec
                .as_slice()
                .iter()
                .zip(g.as_slice())
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            assert!(
                rel_close(err, dropped, 1e-9),
                "set {set:?}: {err} vs {dropped}"
            );
        }
    }
}

#[test]
fn image_mse_after_omission_matches_coefficient_energy() {
    // per-block transform over a 2x2 tiling; MSE over the whole image
    let mut rng = SplitMix64::new(31337);
    let (size, blocks) = (16usize, 4usize);
    let tiles: Vec<Grid<f64>> = (0..blocks)
        .map(|_| Grid::from_fn(size, size, |_, _| (rng.next_u64() % 256) as f64))
        .collect();
    let order = subband_order(3);
    for omit in [vec![0usize], vec![7, 8, 9], vec![3, 6, 9]] {
        let mut sq_err = 0.0;
        let mut dropped = 0.0;
        for tile in &tiles {
            let mut c = oracle::forward_multilevel(tile, 3).unwrap();
            for &i in &omit {
                let (x0, y0, side) = subband_rect(size, order[i]);
                for y in y0..y0 + side {
                    for x in x0..x0 + side {
                        dropped += c.get(x, y).powi(2);
                        c.set(x, y, 0.0);
                    }
                }
            }
            let rec = oracle::inverse_multilevel(&c, 3).unwrap();
            sq_err += rec
                .as_slice()
                .iter()
                .zip(tile.as_slice())
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>();
        }
        let pixels = (blocks * size * size) as f64;
        assert!(rel_close(sq_err / pixels, dropped / pixels, 1e-9));
    }
}
