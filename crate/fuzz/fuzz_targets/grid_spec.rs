#![no_main]

use colheat_cli::args::Grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(grid) = text.parse::<Grid>() else { return };
    if grid.points > 10_000 {
        return;
    }
    let v = grid.values();
    assert_eq!(v.len(), grid.points);
    assert!(v.iter().all(|x| x.is_finite()));
    let again: Grid = grid.to_string().parse().unwrap();
    assert_eq!(again.points, grid.points);
});
