pub fn run_from_args() -> i32 { 0 }
