//! Closed-form high-modulation limits against bisected values.

use cvqkd::figures::constants_table;

fn main() {
    println!(
        "{:<24} {:>12} {:>12} {:>10}",
        "name", "analytic", "numeric", "gap"
    );
    for row in constants_table() {
        match &row.numeric {
            Ok(n) => println!(
                "{:<24} {:>12.9} {:>12.9} {:>10.2e}",
                row.name,
                row.analytic,
                n,
                (n - row.analytic).abs()
            ),
            Err(e) => println!("{:<24} {:>12.9} failed: {e}", row.name, row.analytic),
        }
    }
}
