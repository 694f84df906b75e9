# CLI helpers: settings, level labels, exporters
