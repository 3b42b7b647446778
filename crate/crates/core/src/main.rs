fn main() {
    std::process::exit(knapsack_pareto::cli::main(std::env::args_os()));
}
