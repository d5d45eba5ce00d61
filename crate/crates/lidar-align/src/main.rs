fn main() {
    std::process::exit(lidar_align::cli::run(std::env::args()));
}
