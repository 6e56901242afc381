//! Key-rate bound for observed statistics, with every intermediate quantity.
//!
//! ```text
//! cargo run --example key_rate_report                 # built-in 3% symmetric channel
//! cargo run --example key_rate_report -- link.stats   # statistics from a file
//! ```

use sqkd::keyrate::key_rate_bound;
use sqkd::scenario::{symmetric_stats, ScenarioParams};
use sqkd::statsfile;

fn main() -> sqkd::Result<()> {
    let stats = match std::env::args().nth(1) {
        Some(path) => statsfile::read(path.as_ref(), false)?,
        None => symmetric_stats(ScenarioParams::new(0.03, 0.03, 0.03)?),
    };

    print!("{}", statsfile::to_string(&stats));
    println!();

    let r = key_rate_bound(&stats)?;
    println!("overlap lower bound B      {:.9}", r.b);
    println!("capped square              {:.9}", r.cal_b);
    println!(
        "largest eigenvalue bound   {:.9}{}",
        r.lambda_tilde,
        if r.lambda_clamped { " (clamped)" } else { "" }
    );
    println!("S(BEC)                     {:.9}", r.s_bec);
    println!("S(EC) upper bound          {:.9}", r.s_ec_upper);
    println!("S(B|EC) lower bound        {:.9}", r.s_bec - r.s_ec_upper);
    println!("H(B|A)                     {:.9}", r.h_b_given_a);
    println!("key rate                   {:.9}", r.rate);
    Ok(())
}
