//! Runs the quantum stage of the protocol against a symmetric flip attack and
//! compares the estimated statistics and key rate with the exact values.

use std::time::Instant;

use sqkd::keyrate::key_rate_bound;
use sqkd::simulator::{estimate_statistics, qber, run_protocol, ProtocolConfig};
use sqkd::statsfile::KEYS;
use sqkd::CollectiveAttack;

fn main() -> sqkd::Result<()> {
    let attack = CollectiveAttack::symmetric(0.05, 0.05)?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = ProtocolConfig::new(2_000_000, 7).with_workers(workers);

    let start = Instant::now();
    let (tally, keys) = run_protocol(&attack, &config)?;
    println!(
        "{} rounds on {workers} workers in {:.2?}",
        tally.total,
        start.elapsed()
    );

    let est = estimate_statistics(&tally)?;
    let exact = attack.statistics();
    println!(
        "{:<14} {:>12} {:>12} {:>8}",
        "", "estimate", "exact", "sigma"
    );
    for (n, key) in KEYS.iter().enumerate() {
        let (got, want, se) = (
            est.stats.to_array()[n],
            exact.to_array()[n],
            est.errors.to_array()[n],
        );
        let z = if se > 0.0 { (got - want) / se } else { 0.0 };
        println!("{key:<14} {got:>12.6} {want:>12.6} {z:>8.2}");
    }

    println!("raw key: {} bits, QBER {:.5}", keys.len(), qber(&keys)?);
    println!(
        "rate bound: estimated {:.5} +/- {:.5}, exact statistics {:.5}",
        key_rate_bound(&est.stats)?.rate,
        est.rate_standard_error()?,
        key_rate_bound(&exact)?.rate
    );
    println!(
        "rate this attack actually allows: {:.5}",
        attack.exact_collective_rate()?
    );
    Ok(())
}
