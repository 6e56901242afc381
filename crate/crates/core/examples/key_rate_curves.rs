//! Key rate against noise for every scenario and ratio, as CSV files under
//! `target/key_rate_curves/`, plus a coarse text plot of the equal-noise curves.

use std::fs;
use std::path::Path;

use sqkd::scenario::{sweep, Scenario};

const Q_MAX: f64 = 0.1;
const STEPS: usize = 101;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new("target/key_rate_curves");
    fs::create_dir_all(dir)?;
    for sc in Scenario::ALL {
        for ratio in [0.5, 1.0, 2.0] {
            let points = sweep(sc, ratio, Q_MAX, STEPS)?;
            let mut csv = String::from("Q,rate\n");
            for p in &points {
                csv += &format!("{:.9},{:.9}\n", p.q, p.rate);
            }
            let path = dir.join(format!("{sc}-{ratio}.csv"));
            fs::write(&path, csv)?;
            println!("wrote {}", path.display());
        }
    }

    println!("\nequal noise, rate vs Q ('.' = 1/2, 'o' = 1, '#' = 2):");
    let curves: Vec<_> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&r| sweep(Scenario::Equal, r, Q_MAX, 21))
        .collect::<Result<_, _>>()?;
    for n in 0..21 {
        let mut line = vec![b' '; 50];
        for (curve, mark) in curves.iter().zip(*b".o#") {
            let rate = curve[n].rate;
            if rate > 0.0 {
                line[((rate * 49.0).round() as usize).min(49)] = mark;
            }
        }
        println!("{:.3} |{}", curves[0][n].q, String::from_utf8(line)?);
    }
    Ok(())
}
