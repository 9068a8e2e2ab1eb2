# Core simulation logic
