#include "permfwer/parallel.hpp"

#include <cstdlib>
#include <string>

namespace permfwer {

unsigned default_workers() {
    if (const char* env = std::getenv("PERMFWER_WORKERS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) return static_cast<unsigned>(value);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

}  // namespace permfwer
