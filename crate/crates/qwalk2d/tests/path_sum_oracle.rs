//! Cross-checks the array evolution against a brute-force path-sum oracle:
//! the amplitude at (x, y, channel, t) written as an explicit sum over all
//! channel paths, with one coin factor and one shift per step. The oracle
//! shares no code with the dense sweep in the library.

use std::collections::HashMap;

use num_complex::Complex64;
use qwalk2d::harness::{sample_haar_state, stream_rng};
use qwalk2d::{CoinChannel, CoinMatrix, NonRepeatingParams, WalkerState};

fn path_sum(
    initial: &[Complex64; 4],
    coin: &CoinMatrix,
    t: usize,
) -> HashMap<(i64, i64, usize), Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut cur: HashMap<(i64, i64, usize), Complex64> = HashMap::new();
    for (channel, &amp) in initial.iter().enumerate() {
        if amp != zero {
            cur.insert((0, 0, channel), amp);
        }
    }
    for _ in 0..t {
        let mut next: HashMap<(i64, i64, usize), Complex64> = HashMap::new();
        for ((x, y, cin), amp) in &cur {
            for cout in 0..4 {
                let weight = coin.entry(cout, *cin);
                if weight == zero {
                    continue;
                }
                let (dx, dy) = CoinChannel::from_index(cout).offset();
                *next.entry((x + dx, y + dy, cout)).or_insert(zero) += weight * *amp;
            }
        }
        cur = next;
    }
    cur
}

#[test]
fn array_evolution_matches_path_sum() {
    let params = NonRepeatingParams::sample(&mut stream_rng(3, 1, 0));
    let coins = [
        CoinMatrix::hadamard4(),
        CoinMatrix::grover4(),
        CoinMatrix::dft4(),
        CoinMatrix::non_repeating(&params),
        CoinMatrix::non_reversal(&params),
    ];
    for coin in &coins {
        for (seed, t) in [(5u64, 4usize), (6, 5)] {
            let state = sample_haar_state(seed);
            let walker = WalkerState::new(&state, t).evolve(coin, t).unwrap();
            let oracle = path_sum(state.components(), coin, t);
            let mut worst = 0.0f64;
            for x in -(t as i64)..=t as i64 {
                for y in -(t as i64)..=t as i64 {
                    for c in 0..4 {
                        let got = walker.amplitude(x, y, CoinChannel::from_index(c));
                        let want = oracle.get(&(x, y, c)).copied().unwrap_or_default();
                        worst = worst.max((got - want).norm());
                    }
                }
            }
            assert!(
                worst <= 1e-13,
                "{:?} t={t}: max |array - path_sum| = {worst:.3e}",
                coin.family()
            );
        }
    }
    // Channels that never received amplitude stay structurally empty.
    let coin = CoinMatrix::non_repeating(&params);
    let oracle = path_sum(
        qwalk2d::InitialCoinState::basis(CoinChannel::XPlus).components(),
        &coin,
        2,
    );
    assert!(!oracle.contains_key(&(2, 0, CoinChannel::XPlus.index())));
}
