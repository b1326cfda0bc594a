// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#include <relaydmt/cli.hpp>

int main(int argc, char** argv)
{
    return relaydmt::cli::run(argc, argv);
}
