use lpp_lab::environment::Environment;
use lpp_lab::lattice::antidiag_indices;
use lpp_lab::lpp::{from_boundary, geodesic_backtrack, FieldOptions};
use lpp_lab::profiles::BoundaryProfile;

fn main() {
    let env = Environment::new(60_000);
    let b = BoundaryProfile::stationary(0.5).unwrap();
    let field = from_boundary(&env, &b, 25, 1.0, -25, 25,
        FieldOptions { track_labels: true, full: true }).unwrap();
    let gi = geodesic_backtrack(&env, &field, antidiag_indices(-4, 25)).unwrap();
    let gj = geodesic_backtrack(&env, &field, antidiag_indices(4, 25)).unwrap();
    println!("Z[-4] = {:?}, Z[4] = {:?}", field.label(-4), field.label(4));
    let row = |g: &lpp_lab::lpp::Geodesic, l: i64| -> Vec<i64> {
        g.points.iter().filter(|p| p.l == l).map(|p| p.k).collect()
    };
    for l in 9..14 {
        println!("row {l}: gi {:?} gj {:?}", row(&gi, l), row(&gj, l));
    }
}
