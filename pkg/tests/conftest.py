# kept so pytest puts this directory on sys.path for the support module
