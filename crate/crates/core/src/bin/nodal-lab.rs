fn main() {
    std::process::exit(nodal_lab::driver::cli_main(std::env::args_os()));
}
