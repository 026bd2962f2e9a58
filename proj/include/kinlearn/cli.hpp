#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kinlearn {

/// Exit codes of the kinlearn command.
enum ExitCode : int {
    kExitOk = 0,
    kExitIo = 1,              // unreadable/unwritable file, parse error, schema mismatch
    kExitUsage = 2,           // bad flags, invalid spec, missing configuration or ground truth
    kExitTooFewClusters = 3,  // segmentation found fewer than two parts
    kExitDisconnected = 4,    // no spanning tree over the parts
    kExitUnknownObject = 5,
    kExitDuplicateObject = 6,
};

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kinlearn
