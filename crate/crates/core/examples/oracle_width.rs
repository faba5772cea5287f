//! The instance showing that a width-bounded oracle needs width growing
//! like n / eta, checked exhaustively member by member.

use psd_sparsify::block::{feasible_alpha_interval, oracle_width_fixture};

fn main() -> psd_sparsify::Result<()> {
    for eta in [0.05, 0.1] {
        for k in 1..=3 {
            let f = oracle_width_fixture(k, eta)?;
            let mut narrowest = [f64::INFINITY; 3];
            for (j, b) in f.collection.matrices().iter().enumerate() {
                if let Some((lo, _)) = feasible_alpha_interval(b, &f.x1, &f.x2, eta, f64::INFINITY)
                {
                    let t = f.types[j] as usize - 1;
                    narrowest[t] = narrowest[t].min(lo * b.trace());
                }
            }
            println!(
                "eta {eta}, n {}: narrowest feasible width by type {:?}, claimed floor {:.2}",
                3 * k,
                narrowest.map(|w| if w.is_finite() {
                    format!("{w:.2}")
                } else {
                    "none".into()
                }),
                f.lower_bound
            );
        }
    }
    Ok(())
}
