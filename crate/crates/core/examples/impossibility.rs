//! The configuration that no oblivious algorithm can turn into a line under
//! circular ranges: its middle robots cannot move without losing a neighbor,
//! and its corner robots already see what a finished line end sees.

use maxline::fixtures::{c2, indistinguishable_from_line_end, make_fixture, stuck_check, FixtureKind};
use maxline::RangeModel;

fn main() -> maxline::Result<()> {
    let config = make_fixture(FixtureKind::C2, 1.0)?;
    for (i, p) in config.positions().iter().enumerate() {
        println!("robot {i}: ({:+.4}, {:+.4})", p.x, p.y);
    }

    let circular = RangeModel::circular(1.0);
    let report = stuck_check(&config, &circular, 21)?;
    println!("\ncircular range, {} probes per robot", report.robot(0).probes);
    for &i in &c2::STUCK {
        let r = report.robot(i);
        println!(
            "robot {i}: stuck {}, moves keeping the graph connected {:?}",
            r.is_stuck(),
            r.preserving
        );
    }
    for &i in &c2::LINE_ENDS {
        let same = indistinguishable_from_line_end(&config, i, circular, 1.0)?;
        println!("robot {i}: sees a line end {same}");
    }

    let square = stuck_check(&config, &RangeModel::square(1.0), 21)?;
    let left = square.robot(c2::LEFT_MID);
    println!(
        "\nsquare range: robot {} slides right up to 1: {}",
        c2::LEFT_MID,
        left.free_rightwards(&square.grid, 1.0)
    );

    let alpha = make_fixture(FixtureKind::Alpha(2.0), 1.0)?;
    let areport = stuck_check(&alpha, &circular, 21)?;
    let stuck = (4..alpha.n()).filter(|&i| areport.robot(i).is_stuck()).count();
    println!("viewing range 2: {} robots, {stuck} stuck", alpha.n());
    Ok(())
}
