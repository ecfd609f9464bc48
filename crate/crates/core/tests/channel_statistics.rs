use wavecast::{ChannelModel, Exec};

#[test]
fn bsc_flip_rate_is_calibrated_across_seeds() {
    let n = 100_000usize;
    let zeros = vec![0u8; n / 8];
    for p in [1e-3, 1e-2, 0.1] {
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let counts = Exec::default().map_range(100, |seed| {
            let out = ChannelModel::bsc(p, seed as u64)
                .unwrap()
                .transmit_bytes(&zeros);
            out.iter().map(|b| b.count_ones() as usize).sum::<usize>()
        });
        for (seed, &c) in counts.iter().enumerate() {
            // per-seed 5 sigma band
            assert!(
                (c as f64 - n as f64 * p).abs() <= 5.0 * sigma,
                "p={p} seed={seed} flips={c}"
            );
        }
        let total: usize = counts.iter().sum();
        let rate = total as f64 / (100 * n) as f64;
        let sigma_rate = (p * (1.0 - p) / (100 * n) as f64).sqrt();
        assert!((rate - p).abs() <= 3.0 * sigma_rate, "p={p} rate={rate}");
    }
}

#[test]
fn burst_rate_matches_expectation() {
    // a burst starts at a visited position with probability `rate`; the walk
    // skips `len` bits after each burst, so bursts per bit = rate / (1 + rate*(len-1))
    let (rate, len, n) = (1e-3, 4usize, 400_000usize);
    let zeros = vec![0u8; n / 8];
    let flipped: usize = (0..20u64)
        .map(|seed| {
            let out = ChannelModel::burst(rate, len, seed)
                .unwrap()
                .transmit_bytes(&zeros);
            out.iter().map(|b| b.count_ones() as usize).sum::<usize>()
        })
        .sum();
    let expected = 20.0 * n as f64 * len as f64 * rate / (1.0 + rate * (len as f64 - 1.0));
    let sigma = (expected * len as f64).sqrt();
    assert!(
        (flipped as f64 - expected).abs() <= 4.0 * sigma,
        "{flipped} vs {expected}"
    );
}
