#include "epiwelfare/commands.hpp"

int main(int argc, char** argv) { return epiwelfare::run_cli(argc, argv); }
