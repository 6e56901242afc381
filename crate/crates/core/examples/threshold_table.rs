//! Noise tolerance of the three symmetric scenarios for X-basis error ratios
//! 1/2, 1 and 2.

use std::time::Instant;

use sqkd::scenario::{noise_threshold, Scenario};

fn main() -> sqkd::Result<()> {
    let start = Instant::now();
    println!(
        "{:>9} {:>10} {:>10} {:>10}",
        "Qx/Q", "equal", "fwd-half", "rev-half"
    );
    for ratio in [0.5, 1.0, 2.0] {
        let mut row = format!("{ratio:>9}");
        for sc in Scenario::ALL {
            row += &format!(" {:>9.3}%", 100.0 * noise_threshold(sc, ratio)?);
        }
        println!("{row}");
    }
    println!("({:.1?})", start.elapsed());
    Ok(())
}
