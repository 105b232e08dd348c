from .appconfig import AppConfigClient
