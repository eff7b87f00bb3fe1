//! Zero-sum matrix games through the simplex solver.

use sigpatrol::game::{solve_zero_sum, MatrixGame};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // rock paper scissors, row player's payoff
    let rps = MatrixGame::new(vec![vec![0.0, -1.0, 1.0], vec![1.0, 0.0, -1.0], vec![-1.0, 1.0, 0.0]])?;
    let sol = solve_zero_sum(&rps)?;
    println!("rps value {:.6}, row {:.3?}", sol.value, sol.row.probs);

    // one patroller choosing a route against an attacker choosing a target:
    // protected targets pay 1, the others 1 - value
    let values = [0.9, 0.6, 0.8];
    let routes = [vec![0], vec![1, 2], vec![0, 1]];
    let payoff = routes
        .iter()
        .map(|r| (0..values.len()).map(|t| if r.contains(&t) { 1.0 } else { 1.0 - values[t] }).collect())
        .collect();
    let sol = solve_zero_sum(&MatrixGame::new(payoff)?)?;
    println!("patrol value {:.6} (dual {:.6})", sol.value, sol.col_value);
    println!("route mix {:.3?}", sol.row.probs);
    println!("attack mix {:.3?}", sol.col.probs);
    Ok(())
}
